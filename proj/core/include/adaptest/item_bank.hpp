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

#ifndef ADAPTEST_ITEM_BANK_HPP
#define ADAPTEST_ITEM_BANK_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "adaptest/irt.hpp"
#include "adaptest/random.hpp"

namespace adaptest {

using ItemId = std::int64_t;
using SectionId = std::int64_t;
using UsedSet = std::set<ItemId>;

struct Item {
  ItemId item_id = 0;
  SectionId section_id = 0;
  ItemParams params;
};

/// Sections smaller than this load with a warning.
inline constexpr std::size_t kRecommendedSectionSize = 40;

/// Tolerance for recognising a default (a = 1, b = 0) item.
inline constexpr double kDefaultItemTolerance = 1e-9;

/// Which branch of the selection procedure produced an item.
enum class SelectionRule {
  DefaultItem,        // position 1: an item with a = 1, b = 0
  InitialRange,       // position 1: -0.25 <= b <= 0.25
  HarderRange,        // position 2 after a correct: 0.5 <= b <= 1.0
  HarderFallback,     // position 2 after a correct: b >= 0
  EasierRange,        // position 2 after an incorrect: -1.0 <= b <= -0.5
  EasierFallback,     // position 2 after an incorrect: b <= 0
  BoundaryNearest,    // position 2, both ranges empty: nearest to b = 0
  NearestDifficulty,  // position >= 3: minimises |b - theta_hat|
};

const char* to_string(SelectionRule rule) noexcept;

struct Selection {
  Item item;
  SelectionRule rule;
};

/// Immutable, sectioned pool of items.
///
/// Item order within a section is the order given at construction; random
/// picks index into that order, so a fixed bank and seed reproduce every
/// selection exactly. Selection never mutates the bank.
class ItemBank {
 public:
  /// Throws InvalidArgument on duplicate item ids, invalid parameters or an
  /// empty item list.
  explicit ItemBank(std::vector<Item> items);

  /// Parses {"sections": [{"section_id": .., "items": [{"item_id": ..,
  /// "a": .., "b": ..}]}]}.
  static ItemBank from_json(std::string_view text);
  static ItemBank load(const std::filesystem::path& path);

  /// Serialises in the same schema, sections ascending.
  std::string to_json() const;

  std::span<const Item> section(SectionId id) const;
  bool has_section(SectionId id) const;
  std::vector<SectionId> section_ids() const;
  const Item* find(ItemId id) const;
  std::size_t size() const noexcept { return size_; }

  /// Non-fatal findings from construction, such as undersized sections.
  const std::vector<std::string>& warnings() const noexcept {
    return warnings_;
  }

  Selection pick_initial(SectionId section, Rng& rng) const;
  Selection pick_second(SectionId section, bool first_correct,
                        const UsedSet& used, Rng& rng) const;
  Selection pick_nearest(SectionId section, double theta_hat,
                         const UsedSet& used, Rng& rng) const;

 private:
  std::map<SectionId, std::vector<Item>> sections_;
  std::unordered_map<ItemId, std::pair<SectionId, std::size_t>> index_;
  std::vector<std::string> warnings_;
  std::size_t size_ = 0;
};

}  // namespace adaptest

#endif  // ADAPTEST_ITEM_BANK_HPP
