#include "cosmem/classify.hpp"

#include <cstdint>
#include <unordered_map>

namespace cosmem {

const char* to_string(Tristate t) {
  switch (t) {
    case Tristate::no:
      return "no";
    case Tristate::yes:
      return "yes";
    case Tristate::unknown:
      return "unknown";
  }
  return "?";
}

namespace {

// Bank-local address keys. rank/bank/row/column are 32-bit in the data model.
std::uint64_t rb_key(std::uint32_t rank, std::uint32_t bank) {
  return (static_cast<std::uint64_t>(rank) << 32) | bank;
}

std::uint64_t line_key(std::uint64_t rb, std::uint32_t v, bool is_row) {
  // Mix the (rank, bank) key with the row/column value; separate row and
  // column universes.
  return rb * 0x9e3779b97f4a7c15ull ^ (static_cast<std::uint64_t>(v) << 1 | (is_row ? 1 : 0));
}

struct CellKey {
  std::uint64_t rb;
  std::uint64_t rc;
  bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const {
    return std::hash<std::uint64_t>()(k.rb * 0x9e3779b97f4a7c15ull ^ k.rc);
  }
};

} // namespace

CeLabels label_ce_events(std::span<const CorrectedErrorEvent> events) {
  CeLabels labels;
  labels.transient.assign(events.size(), Tristate::unknown);
  labels.single_cell.assign(events.size(), Tristate::unknown);

  // Group event indices per DIMM; labels are DIMM-local.
  std::unordered_map<std::string, std::vector<std::size_t>> by_dimm;
  for (std::size_t i = 0; i < events.size(); ++i) {
    by_dimm[events[i].dimm].push_back(i);
  }

  std::unordered_map<std::uint64_t, std::uint32_t> row_count, col_count;
  std::unordered_map<CellKey, std::uint32_t, CellKeyHash> cell_count;
  for (auto& [dimm, idxs] : by_dimm) {
    row_count.clear();
    col_count.clear();
    cell_count.clear();
    for (std::size_t i : idxs) {
      const auto& e = events[i];
      if (!e.rank || !e.bank) continue;
      const std::uint64_t rb = rb_key(*e.rank, *e.bank);
      if (e.row) ++row_count[line_key(rb, *e.row, true)];
      if (e.column) ++col_count[line_key(rb, *e.column, false)];
      if (e.row && e.column) {
        ++cell_count[CellKey{
            rb, (static_cast<std::uint64_t>(*e.row) << 32) | *e.column}];
      }
    }
    for (std::size_t i : idxs) {
      const auto& e = events[i];
      if (!e.has_cell() || !e.rank || !e.bank) continue;
      const std::uint64_t rb = rb_key(*e.rank, *e.bank);
      const CellKey cell{rb,
                         (static_cast<std::uint64_t>(*e.row) << 32) | *e.column};
      const bool once = cell_count[cell] == 1;
      labels.single_cell[i] = once ? Tristate::yes : Tristate::no;
      const bool row_alone = row_count[line_key(rb, *e.row, true)] == 1;
      const bool col_alone = col_count[line_key(rb, *e.column, false)] == 1;
      labels.transient[i] =
          (once && row_alone && col_alone) ? Tristate::yes : Tristate::no;
    }
  }
  return labels;
}

Category derive_category(const std::string& dimm_id, const Topology& topology) {
  Category c;
  if (const DimmRecord* d = topology.find_dimm(dimm_id)) {
    c.manufacturer = d->manufacturer;
    c.technology = d->technology;
  }
  return c;
}

int classify_bit_width(const ScrubberErrorEvent& event) {
  return event.bits_flipped >= 6 ? 6 : static_cast<int>(event.bits_flipped);
}

std::string bit_class_name(int bit_class) {
  return bit_class >= 6 ? "6+" : std::to_string(bit_class);
}

} // namespace cosmem
