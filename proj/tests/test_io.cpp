#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "cxrisk/io.hpp"
#include "cxrisk/rng.hpp"
#include "cxrisk/synth.hpp"
#include "testutil.hpp"

using namespace cxrisk;

namespace {

std::vector<std::string> default_names() {
  std::vector<std::string> names;
  for (int i = 1; i <= kRegionCount; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "region_%02d", i);
    names.emplace_back(buf);
  }
  return names;
}

}  // namespace

TEST_CASE("feature map round trip is bit exact") {
  testutil::TempDir tmp("fmap");
  Rng rng(3);
  FeatureMap fm(3, 5, 7);
  for (float& v : fm.values) v = static_cast<float>(rng.normal() * 10.0);
  const auto path = tmp.path() / "a.fmap";
  write_feature_map(path, fm);
  const FeatureMap back = read_feature_map(path);
  CHECK(back.channels == 3);
  CHECK(back.height == 5);
  CHECK(back.width == 7);
  CHECK(back.values == fm.values);

  // header starts with the magic and version
  std::ifstream in(path, std::ios::binary);
  char head[5];
  in.read(head, 5);
  CHECK(std::string(head, 4) == "FMAP");
  CHECK(head[4] == 1);
}

TEST_CASE("feature map reader rejects malformed files") {
  testutil::TempDir tmp("fmapbad");
  const auto path = tmp.path() / "bad.fmap";
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOPE";
  }
  CHECK_THROWS_AS(read_feature_map(path), ParseError);
  {
    FeatureMap fm(1, 2, 2);
    write_feature_map(path, fm);
    // truncate the payload
    std::filesystem::resize_file(path, 20);
  }
  CHECK_THROWS_AS(read_feature_map(path), ParseError);
  CHECK_THROWS_AS(read_feature_map(tmp.path() / "missing.fmap"), IoError);
}

TEST_CASE("labels CSV round trip is value exact") {
  testutil::TempDir tmp("labels");
  Rng rng(5);
  std::vector<SurvivalRecord> records;
  for (int i = 0; i < 40; ++i)
    records.push_back({"subj_" + std::to_string(i), rng.uniform(1e-6, 500.0), rng.uniform() < 0.5});
  records.push_back({"tiny", 6.099183672750661e-05, true});
  const auto path = tmp.path() / "labels.csv";
  write_labels_csv(path, records);
  const auto back = read_labels_csv(path);
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(back[i].subject_id == records[i].subject_id);
    CHECK(back[i].time_days == records[i].time_days);  // bit-for-bit via %.17g
    CHECK(back[i].event == records[i].event);
  }
}

TEST_CASE("labels CSV parser validates") {
  testutil::TempDir tmp("labelsbad");
  const auto path = tmp.path() / "labels.csv";
  auto write = [&](const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    out << text;
  };
  write("wrong,header\n");
  CHECK_THROWS_AS(read_labels_csv(path), ParseError);
  write("subject_id,time_days,event\na,1.0,2\n");
  CHECK_THROWS_AS(read_labels_csv(path), ParseError);
  write("subject_id,time_days,event\na,-1.0,1\n");
  CHECK_THROWS_AS(read_labels_csv(path), ParseError);
  write("subject_id,time_days,event\na,xyz,1\n");
  CHECK_THROWS_AS(read_labels_csv(path), ParseError);
  write("subject_id,time_days,event\n,1.0,1\n");
  CHECK_THROWS_AS(read_labels_csv(path), ParseError);
  CHECK_THROWS_AS(write_labels_csv(path, {{"has,comma", 1.0, true}}), IoError);
}

TEST_CASE("region set JSON round trip") {
  testutil::TempDir tmp("boxes");
  const auto names = default_names();
  SynthConfig cfg;
  cfg.n_subjects = 1;
  cfg.seed = 8;
  cfg.undetected_per_case = 3;
  const RegionSet rs = gen_cohort(cfg, names).subjects[0].regions;

  const auto path = tmp.path() / "b.json";
  write_region_set_json(path, "s1", rs);
  const BoxFile back = read_box_file(path, names);
  CHECK(back.subject_id == "s1");
  REQUIRE(back.regions.has_value());
  CHECK_FALSE(back.proposals.has_value());
  for (int k = 0; k < kRegionCount; ++k) {
    const RegionBox& a = rs.boxes[static_cast<std::size_t>(k)];
    const RegionBox& b = back.regions->boxes[static_cast<std::size_t>(k)];
    CHECK(a.name == b.name);
    CHECK(a.x1 == b.x1);
    CHECK(a.y1 == b.y1);
    CHECK(a.x2 == b.x2);
    CHECK(a.y2 == b.y2);
    CHECK(a.detected == b.detected);
    CHECK(a.score == b.score);
  }
}

TEST_CASE("region set JSON tolerates file order but not missing names") {
  testutil::TempDir tmp("boxorder");
  const auto names = default_names();
  const RegionSet rs = region_set_from_coords(template_layout(), names);
  const auto path = tmp.path() / "b.json";

  // swap two entries in the file; reader restores configured order
  RegionSet swapped = rs;
  std::swap(swapped.boxes[0], swapped.boxes[5]);
  write_region_set_json(path, "s1", swapped);
  const BoxFile back = read_box_file(path, names);
  CHECK(back.regions->boxes[0].name == names[0]);
  CHECK(back.regions->boxes[5].name == names[5]);

  RegionSet renamed = rs;
  renamed.boxes[3].name = "not_a_region";
  CHECK_THROWS_AS(
      [&] {
        write_region_set_json(path, "s1", renamed);
        return read_box_file(path, names);
      }(),
      ParseError);
}

TEST_CASE("proposal JSON round trip") {
  testutil::TempDir tmp("proposals");
  const auto names = default_names();
  ProposalSet ps;
  Proposal p{0.1, 0.2, 0.5, 0.9, std::vector<double>(kRegionCount, 0.0)};
  p.scores[7] = 0.83;
  ps.proposals.push_back(p);
  const auto path = tmp.path() / "p.json";
  write_proposal_set_json(path, "s2", ps);
  const BoxFile back = read_box_file(path, names);
  CHECK(back.subject_id == "s2");
  REQUIRE(back.proposals.has_value());
  REQUIRE(back.proposals->proposals.size() == 1);
  CHECK(back.proposals->proposals[0].x2 == 0.5);
  CHECK(back.proposals->proposals[0].scores[7] == 0.83);
}

TEST_CASE("risk head and completer model round trips") {
  testutil::TempDir tmp("models");
  const RiskHead head{{0.25, -1.5, 3.0}, 0.125};
  const auto hpath = tmp.path() / "head.json";
  write_risk_head_json(hpath, head);
  const RiskHead hback = read_risk_head_json(hpath);
  CHECK(hback.weights == head.weights);
  CHECK(hback.bias == head.bias);

  CompleterConfig ccfg;
  ccfg.hidden_dim = 8;
  ccfg.epochs = 0;
  ccfg.seed = 4;
  const CompleterNet net = completer_train({template_layout()}, ccfg).net;
  const auto cpath = tmp.path() / "completer.json";
  write_completer_json(cpath, net);
  const CompleterNet nback = read_completer_json(cpath);
  CHECK(nback.hidden_dim == net.hidden_dim);
  CHECK(nback.w1 == net.w1);
  CHECK(nback.b3 == net.b3);

  CHECK_THROWS_AS(read_risk_head_json(cpath), ParseError);
  CHECK_THROWS_AS(read_completer_json(hpath), ParseError);
}

TEST_CASE("pgm export shape and range") {
  testutil::TempDir tmp("pgm");
  ActivationMap am(2, 3);
  am.values = {0.0, 0.5, 1.0, 0.25, 0.75, 1.0};
  const auto path = tmp.path() / "m.pgm";
  write_pgm(path, am);
  std::ifstream in(path, std::ios::binary);
  std::string header;
  std::getline(in, header);
  CHECK(header == "P5");
  std::string dims;
  std::getline(in, dims);
  CHECK(dims == "3 2");
  std::string maxval;
  std::getline(in, maxval);
  CHECK(maxval == "255");
  unsigned char bytes[6];
  in.read(reinterpret_cast<char*>(bytes), 6);
  CHECK(bytes[0] == 0);
  CHECK(bytes[1] == 128);
  CHECK(bytes[2] == 255);
  CHECK(bytes[5] == 255);
}

TEST_CASE("km curves CSV") {
  testutil::TempDir tmp("km");
  KMCurve c;
  c.times = {1.0, 2.5};
  c.survival = {0.75, 0.5};
  c.at_risk = {4, 3};
  c.events = {1, 1};
  const auto path = tmp.path() / "km.csv";
  write_km_curves_csv(path, {{"high", c}, {"low", {}}});
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "group,time,survival,at_risk,events");
  std::getline(in, line);
  CHECK(line == "high,1,0.75,4,1");
  std::getline(in, line);
  CHECK(line == "high,2.5,0.5,3,1");
  CHECK_FALSE(std::getline(in, line));  // empty low group writes nothing
}

TEST_CASE("config file parsing") {
  testutil::TempDir tmp("cfg");
  const auto path = tmp.path() / "run.cfg";
  {
    std::ofstream out(path);
    out << "# comment line\n"
        << "out_dir = /tmp/somewhere   # trailing comment\n"
        << "seed = 42\n"
        << "train.learning_rate = 1e-3\n"
        << "quoted = \"a b c\"\n"
        << "names = alpha, beta ,gamma\n"
        << "flag = true\n"
        << "seed = 43\n";  // later assignment wins
  }
  ConfigMap map;
  map.load_file(path);
  CHECK(map.get_string("out_dir", "") == "/tmp/somewhere");
  CHECK(map.get_uint64("seed", 0) == 43);
  CHECK(map.get_double("train.learning_rate", 0.0) == 1e-3);
  CHECK(map.get_string("quoted", "") == "a b c");
  CHECK(map.get_list("names") == std::vector<std::string>{"alpha", "beta", "gamma"});
  CHECK(map.get_bool("flag", false));
  CHECK(map.get_int("absent", 7) == 7);
  CHECK_THROWS_AS(map.get_int("quoted", 0), ParseError);
  CHECK_THROWS_AS(map.get_bool("names", false), ParseError);

  {
    std::ofstream out(path);
    out << "novalue\n";
  }
  ConfigMap bad;
  CHECK_THROWS_AS(bad.load_file(path), ParseError);
}

TEST_CASE("format_double round trips doubles exactly") {
  Rng rng(31);
  for (int i = 0; i < 2000; ++i) {
    double v;
    if (i % 3 == 0) v = rng.uniform(-1e6, 1e6);
    else if (i % 3 == 1) v = rng.normal() * 1e-9;
    else v = rng.exponential(1e-12);
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}
