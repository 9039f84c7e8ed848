// Copyright 2026 The Adaptest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "adaptest/item_bank.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "adaptest/errors.hpp"
#include "json.hpp"

namespace adaptest {

namespace {

using json = nlohmann::json;

template <typename Pred>
std::vector<const Item*> eligible(std::span<const Item> items,
                                  const UsedSet* used, Pred pred) {
  std::vector<const Item*> out;
  for (const auto& item : items) {
    if (used != nullptr && used->contains(item.item_id)) continue;
    if (pred(item)) out.push_back(&item);
  }
  return out;
}

const Item& uniform_pick(const std::vector<const Item*>& candidates,
                         Rng& rng) {
  return *candidates[rng.index(candidates.size())];
}

// Unused item minimising |b - target|, exact ties split uniformly.
const Item& nearest(std::span<const Item> items, double target,
                    const UsedSet& used, Rng& rng) {
  std::vector<const Item*> best;
  double best_distance = std::numeric_limits<double>::infinity();
  for (const auto& item : items) {
    if (used.contains(item.item_id)) continue;
    const double d = std::abs(item.params.b - target);
    if (d < best_distance) {
      best_distance = d;
      best.clear();
      best.push_back(&item);
    } else if (d == best_distance) {
      best.push_back(&item);
    }
  }
  if (best.empty()) {
    throw SelectionExhausted("every item in the section has been used");
  }
  return best.size() == 1 ? *best.front() : uniform_pick(best, rng);
}

}  // namespace

const char* to_string(SelectionRule rule) noexcept {
  switch (rule) {
    case SelectionRule::DefaultItem:
      return "default_item";
    case SelectionRule::InitialRange:
      return "initial_range";
    case SelectionRule::HarderRange:
      return "harder_range";
    case SelectionRule::HarderFallback:
      return "harder_fallback";
    case SelectionRule::EasierRange:
      return "easier_range";
    case SelectionRule::EasierFallback:
      return "easier_fallback";
    case SelectionRule::BoundaryNearest:
      return "boundary_nearest";
    case SelectionRule::NearestDifficulty:
      return "nearest_difficulty";
  }
  return "unknown";
}

ItemBank::ItemBank(std::vector<Item> items) {
  if (items.empty()) throw InvalidArgument("item bank is empty");
  for (auto& item : items) {
    validate(item.params);
    auto& section = sections_[item.section_id];
    const auto [it, inserted] =
        index_.try_emplace(item.item_id, item.section_id, section.size());
    if (!inserted) {
      throw InvalidArgument("duplicate item_id " +
                            std::to_string(item.item_id));
    }
    section.push_back(item);
  }
  size_ = items.size();
  for (const auto& [id, section] : sections_) {
    if (section.size() < kRecommendedSectionSize) {
      warnings_.push_back("section " + std::to_string(id) + " has " +
                          std::to_string(section.size()) +
                          " items; at least " +
                          std::to_string(kRecommendedSectionSize) +
                          " are recommended");
    }
  }
}

ItemBank ItemBank::from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("item bank JSON: ") + e.what());
  }
  std::vector<Item> items;
  try {
    for (const auto& section : doc.at("sections")) {
      const auto section_id = section.at("section_id").get<SectionId>();
      const auto& section_items = section.at("items");
      if (section_items.empty()) {
        throw InvalidArgument("section " + std::to_string(section_id) +
                              " has no items");
      }
      for (const auto& item : section_items) {
        items.push_back({item.at("item_id").get<ItemId>(), section_id,
                         {item.at("a").get<double>(),
                          item.at("b").get<double>()}});
      }
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("item bank JSON: ") + e.what());
  }
  return ItemBank(std::move(items));
}

ItemBank ItemBank::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open item bank " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

std::string ItemBank::to_json() const {
  json sections = json::array();
  for (const auto& [id, items] : sections_) {
    json section_items = json::array();
    for (const auto& item : items) {
      section_items.push_back(
          {{"item_id", item.item_id}, {"a", item.params.a}, {"b", item.params.b}});
    }
    sections.push_back({{"section_id", id}, {"items", section_items}});
  }
  return json{{"sections", sections}}.dump(2) + "\n";
}

std::span<const Item> ItemBank::section(SectionId id) const {
  const auto it = sections_.find(id);
  if (it == sections_.end()) {
    throw InvalidArgument("unknown section " + std::to_string(id));
  }
  return it->second;
}

bool ItemBank::has_section(SectionId id) const {
  return sections_.contains(id);
}

std::vector<SectionId> ItemBank::section_ids() const {
  std::vector<SectionId> ids;
  ids.reserve(sections_.size());
  for (const auto& [id, items] : sections_) ids.push_back(id);
  return ids;
}

const Item* ItemBank::find(ItemId id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) return nullptr;
  return &sections_.at(it->second.first)[it->second.second];
}

Selection ItemBank::pick_initial(SectionId section_id, Rng& rng) const {
  const auto items = section(section_id);
  auto defaults = eligible(items, nullptr, [](const Item& item) {
    return std::abs(item.params.a - 1.0) <= kDefaultItemTolerance &&
           std::abs(item.params.b) <= kDefaultItemTolerance;
  });
  if (!defaults.empty()) {
    return {uniform_pick(defaults, rng), SelectionRule::DefaultItem};
  }
  auto central = eligible(items, nullptr, [](const Item& item) {
    return item.params.b >= -0.25 && item.params.b <= 0.25;
  });
  if (!central.empty()) {
    return {uniform_pick(central, rng), SelectionRule::InitialRange};
  }
  throw SelectionExhausted("section " + std::to_string(section_id) +
                           " has no item with -0.25 <= b <= 0.25");
}

Selection ItemBank::pick_second(SectionId section_id, bool first_correct,
                                const UsedSet& used, Rng& rng) const {
  const auto items = section(section_id);
  if (first_correct) {
    auto harder = eligible(items, &used, [](const Item& item) {
      return item.params.b >= 0.5 && item.params.b <= 1.0;
    });
    if (!harder.empty()) {
      return {uniform_pick(harder, rng), SelectionRule::HarderRange};
    }
    auto nonnegative = eligible(
        items, &used, [](const Item& item) { return item.params.b >= 0.0; });
    if (!nonnegative.empty()) {
      return {uniform_pick(nonnegative, rng), SelectionRule::HarderFallback};
    }
  } else {
    auto easier = eligible(items, &used, [](const Item& item) {
      return item.params.b >= -1.0 && item.params.b <= -0.5;
    });
    if (!easier.empty()) {
      return {uniform_pick(easier, rng), SelectionRule::EasierRange};
    }
    auto nonpositive = eligible(
        items, &used, [](const Item& item) { return item.params.b <= 0.0; });
    if (!nonpositive.empty()) {
      return {uniform_pick(nonpositive, rng), SelectionRule::EasierFallback};
    }
  }
  // Both ranges empty: the item closest to the shared boundary b = 0.
  return {nearest(items, 0.0, used, rng), SelectionRule::BoundaryNearest};
}

Selection ItemBank::pick_nearest(SectionId section_id, double theta_hat,
                                 const UsedSet& used, Rng& rng) const {
  if (!std::isfinite(theta_hat)) {
    throw InvalidArgument("ability estimate must be finite");
  }
  return {nearest(section(section_id), theta_hat, used, rng),
          SelectionRule::NearestDifficulty};
}

}  // namespace adaptest
