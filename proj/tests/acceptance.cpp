// Acceptance suite: runs every release gate at its stated tolerance and
// prints one [PASS]/[FAIL] line per criterion. The CLI binary path comes in
// as argv[1] for the end-to-end and determinism gates.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cxrisk/cam.hpp"
#include "cxrisk/gradcheck.hpp"
#include "cxrisk/io.hpp"
#include "cxrisk/metrics.hpp"
#include "cxrisk/pipeline.hpp"
#include "cxrisk/regional.hpp"
#include "cxrisk/rng.hpp"
#include "cxrisk/synth.hpp"
#include "testutil.hpp"

using namespace cxrisk;
using nlohmann::json;

namespace {

std::string g_cli;  // path to the command-line binary
std::filesystem::path g_work;

int run_cli(const std::string& args) {
  const std::string cmd = g_cli + " " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("missing file: " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> region_names() {
  std::vector<std::string> names;
  for (int i = 1; i <= kRegionCount; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "region_%02d", i);
    names.emplace_back(buf);
  }
  return names;
}

// ---- criteria ---------------------------------------------------------------

bool cox_gradient_matches_fd(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(1001);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_int(0, 18));
    auto [risks, recs] = testutil::random_cohort(rng, n, 0.35);
    const auto analytic = cox_loss_gradient(risks, recs);
    const auto fd = finite_difference_gradient(
        [&recs = recs](const std::vector<double>& r) { return cox_loss(r, recs); }, risks, 1e-5);
    worst = std::max(worst, testutil::max_relative_error(analytic, fd));
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  detail = "max rel err " + std::to_string(worst) + ", " + std::to_string(secs) + " s";
  return worst < 1e-5 && secs < 5.0;
}

bool cox_closed_cases(std::string& detail) {
  const double lone = cox_loss({1.7}, {{"a", 3.0, true}});
  const double two = cox_loss({0.0, 0.0}, {{"a", 1.0, true}, {"b", 2.0, false}});
  detail = "lone=" + format_double(lone) + " two=" + format_double(two);
  return lone == 0.0 && std::fabs(two - std::log(2.0)) < 1e-12;
}

bool cam_gradient_matches_fd(std::string& detail) {
  Rng rng(1003);
  double worst = 0.0;
  bool nonneg = true;
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = static_cast<std::uint32_t>(rng.uniform_int(1, 8));
    const auto hw = static_cast<std::uint32_t>(rng.uniform_int(1, 8));
    FeatureMap fm(c, hw, hw);
    for (float& v : fm.values) v = static_cast<float>(std::fabs(rng.normal()));
    RiskHead head;
    for (std::uint32_t k = 0; k < c; ++k) head.weights.push_back(rng.normal());
    head.bias = rng.normal();

    const GradientVolume analytic = head_feature_gradient(head, fm);
    std::vector<double> flat(fm.values.begin(), fm.values.end());
    const auto fd = finite_difference_gradient(
        [&](const std::vector<double>& x) {
          std::vector<double> pooled(fm.channels, 0.0);
          const std::size_t plane = static_cast<std::size_t>(fm.height) * fm.width;
          for (std::uint32_t ch = 0; ch < fm.channels; ++ch) {
            double sum = 0.0;
            for (std::size_t k = 0; k < plane; ++k) sum += x[ch * plane + k];
            pooled[ch] = sum / static_cast<double>(plane);
          }
          return predict_risk(head, pooled);
        },
        flat, 1e-4);
    for (std::size_t k = 0; k < fd.size(); ++k)
      worst = std::max(worst, std::fabs(analytic.values[k] - fd[k]));
    for (double v : risk_cam(fm, head).values) nonneg = nonneg && v >= 0.0;
  }
  detail = "max abs err " + std::to_string(worst) + (nonneg ? ", CAM >= 0" : ", CAM NEGATIVE");
  return worst < 1e-5 && nonneg;
}

bool c_index_equals_bruteforce(std::string& detail) {
  Rng rng(1004);
  int compared = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_int(0, 48));
    auto [risks, recs] = testutil::random_cohort(rng, n, 0.35);
    if (trial % 5 == 0)
      for (std::size_t i = 1; i < recs.size(); i += 3) recs[i].time_days = recs[i - 1].time_days;
    if (trial % 7 == 0)
      for (std::size_t i = 2; i < risks.size(); i += 4) risks[i] = risks[i - 1];
    bool comparable = false;
    for (std::size_t i = 0; i < recs.size() && !comparable; ++i)
      for (std::size_t j = 0; j < recs.size() && !comparable; ++j)
        comparable = recs[i].event && recs[i].time_days < recs[j].time_days;
    if (!comparable) continue;
    ++compared;
    if (c_index(risks, recs) != testutil::c_index_bruteforce(risks, recs)) {
      detail = "mismatch at trial " + std::to_string(trial);
      return false;
    }
  }
  detail = std::to_string(compared) + " instances exact";
  return true;
}

bool tauc_reduces_to_roc(std::string& detail) {
  Rng rng(1005);
  double worst = 0.0;
  int compared = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 4 + static_cast<int>(rng.uniform_int(0, 36));
    std::vector<double> risks;
    std::vector<SurvivalRecord> recs;
    std::vector<bool> label;
    const double horizon = 3.0;
    bool has_case = false, has_ctrl = false;
    for (int i = 0; i < n; ++i) {
      risks.push_back(rng.uniform(0.0, 1.0));
      const double t = rng.uniform(0.5, 6.0);
      recs.push_back({"p" + std::to_string(i), t, true});
      label.push_back(t <= horizon);
      (t <= horizon ? has_case : has_ctrl) = true;
    }
    if (!has_case || !has_ctrl) continue;
    ++compared;
    worst = std::max(worst, std::fabs(time_dependent_auc(risks, recs, horizon) -
                                      testutil::roc_auc_bruteforce(risks, label)));
  }
  detail = std::to_string(compared) + " instances, max |diff| " + std::to_string(worst);
  return worst < 1e-12;
}

bool km_closed_and_monotone(std::string& detail) {
  const KMCurve c = km_curve(
      {{"a", 1.0, true}, {"b", 2.0, true}, {"c", 3.0, false}, {"d", 4.0, false}});
  if (c.survival.size() != 2 || c.survival[0] != 0.75 || c.survival[1] != 0.5) {
    detail = "worked example wrong";
    return false;
  }
  Rng rng(1006);
  for (int trial = 0; trial < 100; ++trial) {
    auto [risks, recs] =
        testutil::random_cohort(rng, 2 + static_cast<int>(rng.uniform_int(0, 40)), 0.4);
    (void)risks;
    const KMCurve curve = km_curve(recs);
    double prev = 1.0;
    for (double s : curve.survival) {
      if (s < 0.0 || s > prev) {
        detail = "monotonicity violated";
        return false;
      }
      prev = s;
    }
  }
  detail = "S(1)=0.75 S(2)=0.5 exact; 100 cohorts monotone";
  return true;
}

bool log_rank_separation(std::string& detail) {
  Rng rng(1007);
  std::vector<SurvivalRecord> base, fast;
  for (int i = 0; i < 200; ++i) {
    base.push_back({"b" + std::to_string(i), rng.exponential(1.0), true});
    fast.push_back({"f" + std::to_string(i), rng.exponential(5.0), true});
  }
  const LogRankResult separated = log_rank(base, fast);
  const LogRankResult identical = log_rank(base, base);
  detail = "HR5 p=" + format_double(separated.p_value) +
           ", identical p=" + format_double(identical.p_value);
  return separated.p_value < 1e-4 && identical.p_value == 1.0;
}

bool end_to_end_learning(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  const std::filesystem::path train_dir = g_work / "e2e_train";
  const std::filesystem::path test_dir = g_work / "e2e_test";
  std::filesystem::remove_all(train_dir);
  std::filesystem::remove_all(test_dir);
  const std::string cohort_flags =
      " --set synth.n_subjects=500 --set synth.censor_rate=0.2"
      " --set synth.true_weights=1200,0,0,0";
  // held-out evaluation: fit on one cohort, score a fresh one from the same
  // generator, metrics computed on the fresh cohort only
  const std::string model_flag = " --set model=" + (train_dir / "model.json").string();
  if (run_cli("synth --out-dir " + train_dir.string() + " --seed 424242" + cohort_flags) != 0 ||
      run_cli("train --out-dir " + train_dir.string() +
              " --seed 424242 --set train.max_epochs=500 --set train.learning_rate=0.1") != 0 ||
      run_cli("synth --out-dir " + test_dir.string() + " --seed 424243" + cohort_flags) != 0 ||
      run_cli("predict --out-dir " + test_dir.string() + model_flag) != 0 ||
      run_cli("evaluate --out-dir " + test_dir.string() + " --horizon 2") != 0) {
    detail = "a CLI stage failed";
    return false;
  }
  const json metrics = json::parse(slurp(test_dir / "metrics.json"));
  const double cidx = metrics.at("c_index").get<double>();
  const double tauc = metrics.at("t_auc").get<double>();
  const double logrank_p = metrics.at("log_rank").at("p_value").get<double>();
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  detail = "held-out c_index=" + format_double(cidx) + " t_auc=" + format_double(tauc) +
           " km_logrank_p=" + format_double(logrank_p) + ", " + std::to_string(secs) + " s";
  return cidx >= 0.75 && tauc >= 0.75 && logrank_p < 1e-4 && secs < 120.0;
}

bool regional_conservation_and_lesion_rank(std::string& detail) {
  // partition case: template boxes tile the unit square
  SynthConfig flat;
  flat.n_subjects = 5;
  flat.seed = 3001;
  flat.layout_jitter = 0.0;
  const auto names = region_names();
  RiskHead head;
  head.weights = {1.0, 0.0, 0.0, 0.0};
  head.bias = 0.0;
  double worst_rel = 0.0;
  for (const auto& s : gen_cohort(flat, names).subjects) {
    const double risk = predict_risk(head, avg_pool(s.features));
    const ActivationMap cam = upsample_bilinear(risk_cam(s.features, head), 224, 224);
    const RegionalRiskReport rep = regional_report(cam, s.regions, risk);
    double sum = 0.0;
    for (const auto& e : rep.entries) sum += e.regional_risk;
    worst_rel = std::max(worst_rel, std::fabs(sum - risk) / risk);
  }

  SynthConfig planted;
  planted.n_subjects = 100;
  planted.seed = 3002;
  planted.layout_jitter = 0.01;
  int rank_one = 0;
  for (const auto& s : gen_cohort(planted, names).subjects) {
    const double risk = predict_risk(head, avg_pool(s.features));
    const ActivationMap cam = upsample_bilinear(risk_cam(s.features, head), 224, 224);
    const RegionalRiskReport rep = regional_report(cam, s.regions, risk);
    const std::string& lesion = s.regions.boxes[static_cast<std::size_t>(s.lesion_region)].name;
    if (rep.entries[0].name == lesion) ++rank_one;
  }
  detail = "conservation rel err " + format_double(worst_rel) + ", lesion rank-1 " +
           std::to_string(rank_one) + "/100";
  return worst_rel <= 1e-9 && rank_one >= 95;
}

bool completer_recovery(std::string& detail) {
  const std::vector<LayoutCoords> train = gen_layouts(5000, 0.02, 5001);
  CompleterConfig cfg;  // defaults: batch 2000, learning rate 1e-3
  cfg.epochs = 40;
  cfg.seed = 5002;
  const CompleterNet net = completer_train(train, cfg).net;

  const auto names = region_names();
  const std::vector<LayoutCoords> held = gen_layouts(500, 0.02, 5003);
  Rng rng(5004);
  double iou_sum = 0.0;
  int iou_count = 0;
  bool passthrough_ok = true;
  for (const auto& layout : held) {
    RegionSet rs = region_set_from_coords(layout, names);
    const auto masked = rng.sample_without_replacement(kRegionCount, 5);
    for (int k : masked) {
      auto& b = rs.boxes[static_cast<std::size_t>(k)];
      b.detected = false;
      b.score.reset();
      b.x1 = b.y1 = b.x2 = b.y2 = 0.0;
    }
    const CompletionResult res = complete(rs, net);
    for (int k = 0; k < kRegionCount; ++k) {
      const auto& got = res.set.boxes[static_cast<std::size_t>(k)];
      const double tx1 = layout[static_cast<std::size_t>(4 * k) + 0];
      const double ty1 = layout[static_cast<std::size_t>(4 * k) + 1];
      const double tx2 = layout[static_cast<std::size_t>(4 * k) + 2];
      const double ty2 = layout[static_cast<std::size_t>(4 * k) + 3];
      const bool was_masked =
          std::find(masked.begin(), masked.end(), k) != masked.end();
      if (!was_masked) {
        passthrough_ok = passthrough_ok && got.x1 == tx1 && got.y1 == ty1 && got.x2 == tx2 &&
                         got.y2 == ty2 && got.detected;
        continue;
      }
      const double ix = std::max(0.0, std::min(got.x2, tx2) - std::max(got.x1, tx1));
      const double iy = std::max(0.0, std::min(got.y2, ty2) - std::max(got.y1, ty1));
      const double inter = ix * iy;
      const double uni =
          (got.x2 - got.x1) * (got.y2 - got.y1) + (tx2 - tx1) * (ty2 - ty1) - inter;
      iou_sum += uni > 0.0 ? inter / uni : 0.0;
      ++iou_count;
    }
  }
  const double mean_iou = iou_sum / iou_count;

  // gradient check on a tiny net
  CompleterConfig tiny;
  tiny.hidden_dim = 8;
  tiny.epochs = 0;
  tiny.seed = 5005;
  CompleterNet small = completer_train({train[0], train[1]}, tiny).net;
  const std::vector<LayoutCoords> batch(train.begin(), train.begin() + 3);
  const std::vector<std::vector<int>> masks{{0, 5}, {12}, {27, 3, 9}};
  const CompleterGradients analytic = completer_masked_mse_gradients(small, batch, masks);
  std::vector<double> params, analytic_flat;
  for (const auto* v : {&small.w1, &small.b1, &small.w2, &small.b2, &small.w3, &small.b3})
    params.insert(params.end(), v->begin(), v->end());
  for (const auto* v :
       {&analytic.w1, &analytic.b1, &analytic.w2, &analytic.b2, &analytic.w3, &analytic.b3})
    analytic_flat.insert(analytic_flat.end(), v->begin(), v->end());
  const auto fd = finite_difference_gradient(
      [&](const std::vector<double>& p) {
        CompleterNet n = small;
        std::size_t off = 0;
        for (auto* v : {&n.w1, &n.b1, &n.w2, &n.b2, &n.w3, &n.b3}) {
          std::copy(p.begin() + static_cast<std::ptrdiff_t>(off),
                    p.begin() + static_cast<std::ptrdiff_t>(off + v->size()), v->begin());
          off += v->size();
        }
        return completer_masked_mse_gradients(n, batch, masks).loss;
      },
      params, 1e-5);
  const double grad_rel = testutil::max_relative_error(analytic_flat, fd, 1e-4);

  detail = "held-out masked IoU " + std::to_string(mean_iou) + ", gradcheck rel " +
           format_double(grad_rel) + (passthrough_ok ? "" : ", PASSTHROUGH BROKEN");
  return mean_iou >= 0.5 && passthrough_ok && grad_rel <= 1e-4;
}

bool cli_determinism(std::string& detail) {
  const std::filesystem::path full = g_work / "det_full";
  const std::filesystem::path holes = g_work / "det_holes";
  std::filesystem::remove_all(full);
  std::filesystem::remove_all(holes);

  const std::string full_common = " --out-dir " + full.string() + " --seed 777";
  const std::string holes_common = " --out-dir " + holes.string() + " --seed 778";
  const std::string completer_flags =
      " --set completer.train=true --set completer.epochs=12"
      " --set completer.hidden_dim=32 --set completer.batch_size=32";
  const std::string cross =
      " --set completer=" + (full / "completer.json").string() +
      " --set model=" + (full / "model.json").string();

  auto run_all = [&]() {
    return run_cli("synth" + full_common + " --set synth.n_subjects=40"
                   " --set synth.true_weights=900,0,0,0 --set synth.censor_rate=0.2") == 0 &&
           run_cli("train" + full_common + " --set train.max_epochs=15"
                   " --set train.learning_rate=0.01" + completer_flags) == 0 &&
           run_cli("predict" + full_common) == 0 &&
           run_cli("cam" + full_common) == 0 &&
           run_cli("evaluate" + full_common) == 0 &&
           run_cli("synth" + holes_common + " --set synth.n_subjects=10"
                   " --set synth.undetected_per_case=4") == 0 &&
           run_cli("complete" + holes_common + cross) == 0 &&
           run_cli("report" + holes_common + cross) == 0;
  };

  if (!run_all()) {
    detail = "a CLI stage failed";
    return false;
  }
  std::map<std::string, std::string> snapshot;
  for (const auto& root : {full, holes})
    for (const auto& entry : std::filesystem::recursive_directory_iterator(root))
      if (entry.is_regular_file()) snapshot[entry.path().string()] = slurp(entry.path());

  if (!run_all()) {
    detail = "a CLI stage failed on rerun";
    return false;
  }
  std::size_t compared = 0;
  for (const auto& root : {full, holes})
    for (const auto& entry : std::filesystem::recursive_directory_iterator(root))
      if (entry.is_regular_file()) {
        const auto it = snapshot.find(entry.path().string());
        if (it == snapshot.end() || it->second != slurp(entry.path())) {
          detail = "differs: " + entry.path().string();
          return false;
        }
        ++compared;
      }
  if (compared != snapshot.size()) {
    detail = "file set changed between runs";
    return false;
  }
  detail = std::to_string(compared) + " files byte-identical across reruns of all 7 commands";
  return true;
}

bool format_round_trip(std::string& detail) {
  const std::filesystem::path dir = g_work / "roundtrip";
  std::filesystem::remove_all(dir);
  if (run_cli("synth --out-dir " + dir.string() +
              " --seed 909 --set synth.n_subjects=15 --set synth.censor_rate=0.3"
              " --set synth.undetected_per_case=2 --set synth.true_weights=700,0,0,0") != 0) {
    detail = "synth failed";
    return false;
  }
  ConfigMap m;
  m.set("out_dir", dir.string());
  m.set("seed", "909");
  m.set("synth.n_subjects", "15");
  m.set("synth.censor_rate", "0.3");
  m.set("synth.undetected_per_case", "2");
  m.set("synth.true_weights", "700,0,0,0");
  const RunConfig cfg = RunConfig::from_map(m);
  const Cohort cohort = gen_cohort(cfg.synth, cfg.region_names);

  const auto labels = read_labels_csv(cfg.labels_path);
  if (labels.size() != cohort.subjects.size()) {
    detail = "label count mismatch";
    return false;
  }
  for (std::size_t i = 0; i < cohort.subjects.size(); ++i) {
    const auto& s = cohort.subjects[i];
    if (labels[i].subject_id != s.subject_id || labels[i].time_days != s.record.time_days ||
        labels[i].event != s.record.event) {
      detail = "labels differ for " + s.subject_id;
      return false;
    }
    const FeatureMap fm = read_feature_map(cfg.features_dir / (s.subject_id + ".fmap"));
    if (fm.values != s.features.values || fm.channels != s.features.channels) {
      detail = "feature map differs for " + s.subject_id;
      return false;
    }
    const BoxFile bf = read_box_file(cfg.boxes_dir / (s.subject_id + ".json"), cfg.region_names);
    for (int k = 0; k < kRegionCount; ++k) {
      const RegionBox& a = s.regions.boxes[static_cast<std::size_t>(k)];
      const RegionBox& b = bf.regions->boxes[static_cast<std::size_t>(k)];
      if (a.name != b.name || a.x1 != b.x1 || a.y1 != b.y1 || a.x2 != b.x2 || a.y2 != b.y2 ||
          a.detected != b.detected || a.score != b.score) {
        detail = "box differs for " + s.subject_id + " region " + a.name;
        return false;
      }
    }
  }
  detail = "15 subjects bit-exact across FMAP, labels CSV, boxes JSON";
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_cli = argv[1];
  if (g_cli.empty()) {
    std::fprintf(stderr, "usage: acceptance <path-to-cxrisk-cli>\n");
    return 2;
  }
  g_work = std::filesystem::temp_directory_path() / "cxrisk_acceptance";
  std::filesystem::create_directories(g_work);

  struct Criterion {
    const char* title;
    std::function<bool(std::string&)> fn;
  };
  const std::vector<Criterion> criteria = {
      {"Cox gradient matches finite differences (1e-5 rel, 100 instances, <5 s)",
       cox_gradient_matches_fd},
      {"Cox loss closed cases (single event 0; two-subject ln 2 within 1e-12)", cox_closed_cases},
      {"CAM gradient matches finite differences (1e-5 abs, 50 instances) and CAM >= 0",
       cam_gradient_matches_fd},
      {"C-index equals brute-force pair enumeration exactly (1000 instances)",
       c_index_equals_bruteforce},
      {"T-AUC equals binary ROC-AUC within 1e-12 under zero censoring (100 instances)",
       tauc_reduces_to_roc},
      {"K-M worked example exact and non-increasing on 100 random cohorts", km_closed_and_monotone},
      {"Log-rank: hazard-ratio-5 groups give p < 1e-4; identical groups give p = 1",
       log_rank_separation},
      {"End-to-end: train + evaluate on pinned synthetic cohort reaches c-index and T-AUC >= 0.75 "
       "within 2 minutes",
       end_to_end_learning},
      {"Regional risk conserves global risk on a partition (1e-9 rel); planted lesion ranks 1 in "
       ">= 95/100 subjects",
       regional_conservation_and_lesion_rank},
      {"Completer recovers masked regions (IoU >= 0.5 on 500 held-out layouts); pass-through "
       "bit-identical; gradcheck <= 1e-4",
       completer_recovery},
      {"Every CLI command is byte-identical across reruns with the same config and seed",
       cli_determinism},
      {"FMAP, labels CSV, and boxes JSON round-trip bit-for-bit", format_round_trip},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::string detail;
    bool ok = false;
    try {
      ok = criteria[i].fn(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %2zu: %s%s%s\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].title,
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    failed += ok ? 0 : 1;
  }
  if (failed > 0) std::printf("%d of %zu criteria FAILED\n", failed, criteria.size());
  else std::printf("all %zu criteria passed\n", criteria.size());
  return failed == 0 ? 0 : 1;
}
