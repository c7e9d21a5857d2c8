#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "cosmem/errors.hpp"
#include "cosmem/ingest.hpp"
#include "cosmem/synth.hpp"

using namespace cosmem;

namespace {

template <typename Parser>
auto parse_text(const std::string& text, Parser&& parser) {
  std::istringstream in(text);
  return parser(in);
}

} // namespace

TEST_CASE("iso-8601 parsing and formatting") {
  auto t = parse_iso8601("2015-06-01T00:00:00Z");
  REQUIRE(t.has_value());
  CHECK(format_iso8601(*t) == "2015-06-01T00:00:00Z");

  // Offsets fold into UTC.
  auto plus2 = parse_iso8601("2015-06-01T02:00:00+02:00");
  REQUIRE(plus2.has_value());
  CHECK(*plus2 == *t);
  auto minus = parse_iso8601("2015-05-31T22:00:00-02:00");
  REQUIRE(minus.has_value());
  CHECK(*minus == *t);
  // Bare timestamps are UTC.
  CHECK(*parse_iso8601("2015-06-01T00:00:00") == *t);

  CHECK_FALSE(parse_iso8601("2015-06-01 00:00:00Z").has_value());
  CHECK_FALSE(parse_iso8601("2015-06-01T00:00:00.5Z").has_value());
  CHECK_FALSE(parse_iso8601("2015-02-29T00:00:00Z").has_value());
  CHECK_FALSE(parse_iso8601("2015-13-01T00:00:00Z").has_value());

  // Week floors land on Mondays; 2015-06-01 was a Monday.
  CHECK(floor_week(*parse_iso8601("2015-06-03T15:00:00Z")) == *t);
  CHECK(floor_month(*parse_iso8601("2015-06-30T23:59:59Z")) == *t);
  CHECK(add_months(*t, 7) == *parse_iso8601("2016-01-01T00:00:00Z"));
}

TEST_CASE("neutron log parsing") {
  const auto empty = parse_text("timestamp,rate\n", parse_neutron_log);
  CHECK(empty.samples.empty());

  const auto one = parse_text(
      "# monitor_id: GUAD\n# corrected: true\ntimestamp,rate\n"
      "2015-06-01T00:00:00Z,71.3\n",
      parse_neutron_log);
  REQUIRE(one.samples.size() == 1);
  CHECK(one.samples[0].rate == doctest::Approx(71.3));
  CHECK(one.monitor_id == "GUAD");
  CHECK(one.corrected);

  // Equal timestamps are rejected with the offending line.
  try {
    parse_text(
        "timestamp,rate\n2015-06-01T00:00:00Z,1\n2015-06-01T00:00:00Z,2\n",
        parse_neutron_log);
    FAIL("expected NonMonotonicTimestamp");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::non_monotonic_timestamp);
    CHECK(e.line() == 3);
  }

  CHECK_THROWS_AS(parse_text("timestamp,rate\nx,1\n", parse_neutron_log),
                  ParseError);
  CHECK_THROWS_AS(
      parse_text("timestamp,rate\n2015-06-01T00:00:00Z,-3\n",
                 parse_neutron_log),
      ParseError);
  CHECK_THROWS_AS(parse_text("bad,header\n", parse_neutron_log), ParseError);
  CHECK_THROWS_AS(parse_text("", parse_neutron_log), ParseError);
}

TEST_CASE("ce log parsing") {
  const std::string header =
      "timestamp,node,dimm,rank,bank,row,column,detection,multiplicity\n";

  const auto events = parse_text(
      header + "2015-06-01T00:00:00Z,n1,d1,,,,,unknown,3\n" +
          "2015-06-01T00:00:00Z,n1,d1,0,2,10,20,scrub,1\n",
      parse_ce_log);
  REQUIRE(events.size() == 2);
  CHECK(events[0].multiplicity == 3);
  CHECK_FALSE(events[0].rank.has_value());
  CHECK_FALSE(events[0].has_cell());
  CHECK(events[1].detection == Detection::patrol_scrub);
  CHECK(events[1].has_cell());

  // Column present without bank: invariant violation.
  CHECK_THROWS_AS(
      parse_text(header + "2015-06-01T00:00:00Z,n1,d1,0,,,20,read,1\n",
                 parse_ce_log),
      ParseError);
  CHECK_THROWS_AS(
      parse_text(header + "2015-06-01T00:00:00Z,n1,d1,0,,10,20,read,1\n",
                 parse_ce_log),
      ParseError);
  // Zero multiplicity.
  CHECK_THROWS_AS(
      parse_text(header + "2015-06-01T00:00:00Z,n1,d1,,,,,read,0\n",
                 parse_ce_log),
      ParseError);
  // Decreasing timestamps; ties are fine for event logs.
  CHECK_THROWS_AS(
      parse_text(header + "2015-06-01T00:00:01Z,n1,d1,,,,,read,1\n" +
                     "2015-06-01T00:00:00Z,n2,d2,,,,,read,1\n",
                 parse_ce_log),
      ParseError);
  CHECK_NOTHROW(
      parse_text(header + "2015-06-01T00:00:00Z,n1,d1,,,,,read,1\n" +
                     "2015-06-01T00:00:00Z,n2,d2,,,,,read,1\n",
                 parse_ce_log));
}

TEST_CASE("ue and scrub log parsing") {
  const auto ue = parse_text(
      "timestamp,node,dimm,cause\n"
      "2015-06-01T00:00:00Z,n1,d1,scrub_failed\n"
      "2015-06-01T01:00:00Z,n1,d1,ue_warning\n",
      parse_ue_log);
  REQUIRE(ue.size() == 2);
  CHECK(ue[0].cause == UeCause::scrub_failed);
  CHECK(ue[1].cause == UeCause::ue_warning);
  CHECK_THROWS_AS(
      parse_text("timestamp,node,dimm,cause\n2015-06-01T00:00:00Z,n1,d1,bad\n",
                 parse_ue_log),
      ParseError);

  const auto scrub = parse_text(
      "timestamp,node,address,bits_flipped\n"
      "2015-06-01T00:00:00Z,n1,123456,2\n",
      parse_scrub_log);
  REQUIRE(scrub.size() == 1);
  CHECK(scrub[0].address == 123456);
  CHECK_THROWS_AS(
      parse_text(
          "timestamp,node,address,bits_flipped\n2015-06-01T00:00:00Z,n1,5,0\n",
          parse_scrub_log),
      ParseError);
}

TEST_CASE("exposure log parsing") {
  const auto recs = parse_text(
      "interval_start,interval_end,node,mb_scanned\n"
      "2015-06-01T00:00:00Z,2015-06-01T01:00:00Z,n1,2048.5\n",
      parse_exposure_log);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].mb_scanned == doctest::Approx(2048.5));
  CHECK_THROWS_AS(
      parse_text("interval_start,interval_end,node,mb_scanned\n"
                 "2015-06-01T01:00:00Z,2015-06-01T01:00:00Z,n1,10\n",
                 parse_exposure_log),
      ParseError);
}

TEST_CASE("inventory loading and containment checks") {
  const std::string header =
      "dimm,node,socket,rack,manufacturer,technology,capacity_mb\n";
  const auto topo = parse_text(header +
                                   "d1,n1,n1-s0,r1,A,3x,16384\n"
                                   "d2,n1,n1-s0,r1,B,2y,16384\n"
                                   "d3,n2,n2-s0,r2,C,2z,8192\n",
                               load_inventory);
  CHECK(topo.dimms().size() == 3);
  CHECK(topo.racks().size() == 2);
  CHECK(topo.nodes().size() == 2);
  CHECK(topo.sockets().size() == 2);
  CHECK(topo.scope_count() == 1 + 2 + 2 + 2);
  CHECK(topo.find_dimm("d2")->manufacturer == Manufacturer::B);
  CHECK(*topo.rack_of_node("n2") == "r2");

  // Same node under two racks.
  try {
    parse_text(header + "d1,n1,n1-s0,r1,A,3x,1\nd2,n1,n1-s1,r2,A,3x,1\n",
               load_inventory);
    FAIL("expected InconsistentContainment");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::inconsistent_containment);
  }
  try {
    parse_text(header + "d1,n1,n1-s0,r1,A,3x,1\nd1,n1,n1-s0,r1,A,3x,1\n",
               load_inventory);
    FAIL("expected DuplicateDimm");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::duplicate_dimm);
  }

  const auto empty = parse_text(header, load_inventory);
  CHECK(empty.dimms().empty());
  CHECK(empty.scope_count() == 1);
}

TEST_CASE("round-trip: write then parse reproduces the dataset") {
  SynthConfig config;
  config.seed = 7;
  config.start = *parse_iso8601("2015-02-01T00:00:00Z");
  config.end = *parse_iso8601("2015-03-01T00:00:00Z");
  config.topology = {2, 2, 2, 2, 4096};
  config.neutron = {70.0, 0.01, 0.5, "RT"};
  config.fault.ce_rate_per_dimm_hour = 0.05;
  config.ue_rate_per_node_hour = 0.002;
  config.scrub_rate_per_node_hour = 0.05;
  config.exposure_duty_min = 0.5;
  config.exposure_duty_max = 1.0;
  const SynthOutput out = gen_dataset(config);
  REQUIRE(out.dataset.ce.size() > 0);
  REQUIRE(out.dataset.ue.size() > 0);
  REQUIRE(out.dataset.scrub.size() > 0);

  std::ostringstream buf;
  write_neutron_log(buf, out.neutron);
  const auto neutron2 = parse_text(buf.str(), parse_neutron_log);
  REQUIRE(neutron2.samples.size() == out.neutron.samples.size());
  CHECK(neutron2.monitor_id == out.neutron.monitor_id);
  for (std::size_t i = 0; i < neutron2.samples.size(); ++i) {
    CHECK(neutron2.samples[i].timestamp == out.neutron.samples[i].timestamp);
    CHECK(neutron2.samples[i].rate == out.neutron.samples[i].rate);
  }

  buf.str("");
  write_ce_log(buf, out.dataset.ce);
  const auto ce2 = parse_text(buf.str(), parse_ce_log);
  REQUIRE(ce2.size() == out.dataset.ce.size());
  std::uint64_t mult_in = 0, mult_out = 0;
  for (std::size_t i = 0; i < ce2.size(); ++i) {
    CHECK(ce2[i].timestamp == out.dataset.ce[i].timestamp);
    CHECK(ce2[i].dimm == out.dataset.ce[i].dimm);
    CHECK(ce2[i].rank == out.dataset.ce[i].rank);
    CHECK(ce2[i].row == out.dataset.ce[i].row);
    CHECK(ce2[i].detection == out.dataset.ce[i].detection);
    mult_in += out.dataset.ce[i].multiplicity;
    mult_out += ce2[i].multiplicity;
  }
  CHECK(mult_in == mult_out); // event counts preserved

  buf.str("");
  write_ue_log(buf, out.dataset.ue);
  CHECK(parse_text(buf.str(), parse_ue_log).size() == out.dataset.ue.size());

  buf.str("");
  write_scrub_log(buf, out.dataset.scrub);
  CHECK(parse_text(buf.str(), parse_scrub_log).size() ==
        out.dataset.scrub.size());

  buf.str("");
  write_exposure_log(buf, out.dataset.exposure);
  const auto exp2 = parse_text(buf.str(), parse_exposure_log);
  REQUIRE(exp2.size() == out.dataset.exposure.size());
  for (std::size_t i = 0; i < exp2.size(); ++i) {
    CHECK(exp2[i].mb_scanned == out.dataset.exposure[i].mb_scanned);
  }

  buf.str("");
  write_inventory(buf, out.dataset.topology);
  const auto topo2 = parse_text(buf.str(), load_inventory);
  CHECK(topo2.dimms().size() == out.dataset.topology.dimms().size());
}

TEST_CASE("validate_dataset reports unknown references and intervals") {
  Dataset ds;
  std::vector<DimmRecord> dimms;
  dimms.push_back({"d1", "n1", "s1", "r1", Manufacturer::A, Technology::t3x,
                   1024});
  ds.topology = Topology(std::move(dimms));
  CorrectedErrorEvent known;
  known.timestamp = *parse_iso8601("2015-06-01T00:00:00Z");
  known.node = "n1";
  known.dimm = "d1";
  CorrectedErrorEvent unknown = known;
  unknown.node = "ghost-node";
  unknown.dimm = "ghost-dimm";
  ds.ce = {known, unknown, unknown};

  const auto findings = validate_dataset(ds);
  REQUIRE(findings.size() == 2);
  CHECK(findings[0].code == "unknown_dimm");
  CHECK(findings[0].detail == "ghost-dimm");
  CHECK(findings[0].count == 2);
  CHECK(findings[1].code == "unknown_node");

  const auto interval = validate_dataset(
      ds, *parse_iso8601("2015-06-02T00:00:00Z"), std::nullopt);
  bool saw_out_of_interval = false;
  for (const auto& f : interval) {
    saw_out_of_interval |= f.code == "out_of_interval";
  }
  CHECK(saw_out_of_interval);

  // No inventory: reference checks are skipped.
  Dataset no_inv;
  no_inv.ce = {unknown};
  CHECK(validate_dataset(no_inv).empty());
}
