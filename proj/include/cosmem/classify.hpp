#pragma once

#include <span>
#include <vector>

#include "cosmem/types.hpp"

namespace cosmem {

enum class Tristate : std::uint8_t { no, yes, unknown };

const char* to_string(Tristate t);

// Per-event labels, index-aligned with the input. Labeling needs the
// complete event set of each DIMM (two passes, not streamable): an event is
// transient iff, within its (dimm, rank, bank) address space over the whole
// observation period, its cell appears exactly once and no other event
// shares its row or its column. single_cell iff the exact cell appears
// exactly once in the DIMM's history. Events without a full cell address are
// labeled `unknown`; any row or column they do carry still counts toward
// row/column sharing.
struct CeLabels {
  std::vector<Tristate> transient;
  std::vector<Tristate> single_cell;
};

CeLabels label_ce_events(std::span<const CorrectedErrorEvent> events);

struct Category {
  Manufacturer manufacturer = Manufacturer::unknown;
  Technology technology = Technology::unknown;
};

// Joins an event's DIMM to the inventory; unknown DIMMs yield unknown fields.
Category derive_category(const std::string& dimm_id, const Topology& topology);

// Scrubber n-bit class: 1..5 map to themselves, >= 6 saturates to 6 ("6+").
int classify_bit_width(const ScrubberErrorEvent& event);
std::string bit_class_name(int bit_class);

} // namespace cosmem
