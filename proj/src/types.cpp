#include "cosmem/types.hpp"

#include <algorithm>

#include "cosmem/errors.hpp"

namespace cosmem {

const char* to_string(Manufacturer m) {
  switch (m) {
    case Manufacturer::A:
      return "A";
    case Manufacturer::B:
      return "B";
    case Manufacturer::C:
      return "C";
    case Manufacturer::unknown:
      return "unknown";
  }
  return "?";
}

const char* to_string(Technology t) {
  switch (t) {
    case Technology::t3x:
      return "3x";
    case Technology::t2y:
      return "2y";
    case Technology::t2z:
      return "2z";
    case Technology::unknown:
      return "unknown";
  }
  return "?";
}

const char* to_string(Detection d) {
  switch (d) {
    case Detection::memory_read:
      return "read";
    case Detection::patrol_scrub:
      return "scrub";
    case Detection::unknown:
      return "unknown";
  }
  return "?";
}

const char* to_string(UeCause c) {
  switch (c) {
    case UeCause::uncorrected_ecc:
      return "uncorrected_ecc";
    case UeCause::scrub_failed:
      return "scrub_failed";
    case UeCause::ue_warning:
      return "ue_warning";
  }
  return "?";
}

Topology::Topology(std::vector<DimmRecord> dimms) : dimms_(std::move(dimms)) {
  std::unordered_map<std::string, std::string> socket_node;
  for (std::size_t i = 0; i < dimms_.size(); ++i) {
    const DimmRecord& d = dimms_[i];
    if (!dimm_index_.emplace(d.dimm, i).second) {
      throw ParseError(ParseError::Kind::duplicate_dimm, 0,
                       "duplicate DIMM id '" + d.dimm + "'");
    }
    auto [nit, fresh_node] = node_rack_.emplace(d.node, d.rack);
    if (!fresh_node && nit->second != d.rack) {
      throw ParseError(ParseError::Kind::inconsistent_containment, 0,
                       "node '" + d.node + "' appears under racks '" +
                           nit->second + "' and '" + d.rack + "'");
    }
    auto [sit, fresh_socket] = socket_node.emplace(d.socket, d.node);
    if (!fresh_socket && sit->second != d.node) {
      throw ParseError(ParseError::Kind::inconsistent_containment, 0,
                       "socket '" + d.socket + "' appears under nodes '" +
                           sit->second + "' and '" + d.node + "'");
    }
  }

  auto collect = [](auto&& proj, const std::vector<DimmRecord>& dimms,
                    std::vector<std::string>& out) {
    for (const auto& d : dimms) out.push_back(proj(d));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  };
  collect([](const DimmRecord& d) { return d.rack; }, dimms_, racks_);
  collect([](const DimmRecord& d) { return d.node; }, dimms_, nodes_);
  collect([](const DimmRecord& d) { return d.socket; }, dimms_, sockets_);
}

const DimmRecord* Topology::find_dimm(const std::string& id) const {
  auto it = dimm_index_.find(id);
  return it == dimm_index_.end() ? nullptr : &dimms_[it->second];
}

const std::string* Topology::rack_of_node(const std::string& node) const {
  auto it = node_rack_.find(node);
  return it == node_rack_.end() ? nullptr : &it->second;
}

} // namespace cosmem
