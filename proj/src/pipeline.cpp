#include "cxrisk/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "cxrisk/cam.hpp"
#include "cxrisk/metrics.hpp"
#include "cxrisk/regional.hpp"
#include "cxrisk/rng.hpp"

namespace cxrisk {

using nlohmann::json;

namespace {

std::vector<std::string> default_region_names() {
  std::vector<std::string> names;
  for (int i = 1; i <= kRegionCount; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "region_%02d", i);
    names.emplace_back(buf);
  }
  return names;
}

std::vector<double> parse_weight_list(const ConfigMap& map, const std::string& key) {
  std::vector<double> weights;
  for (const auto& item : map.get_list(key)) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0')
      throw ParseError("config key '" + key + "': not a number: '" + item + "'");
    weights.push_back(v);
  }
  return weights;
}

}  // namespace

RunConfig RunConfig::from_map(const ConfigMap& map) {
  RunConfig cfg;
  cfg.raw = map;
  cfg.out_dir = map.get_string("out_dir", "out");
  const auto sub = [&](const std::string& key, const std::string& tail) {
    return std::filesystem::path(map.get_string(key, (cfg.out_dir / tail).string()));
  };
  cfg.features_dir = sub("features_dir", "features");
  cfg.labels_path = sub("labels", "labels.csv");
  cfg.boxes_dir = sub("boxes_dir", "boxes");
  cfg.completed_dir = sub("completed_dir", "completed");
  cfg.model_path = sub("model", "model.json");
  cfg.completer_path = sub("completer", "completer.json");
  cfg.predictions_path = sub("predictions", "predictions.csv");

  cfg.region_names = map.has("region_names") ? map.get_list("region_names") : default_region_names();
  validate_region_names(cfg.region_names);

  cfg.seed = map.get_uint64("seed", 0);
  cfg.horizon = map.get_double("horizon", 2.0);
  cfg.top_k = map.get_int("top_k", 5);
  cfg.cam_height = static_cast<std::uint32_t>(map.get_int("cam_height", 224));
  cfg.cam_width = static_cast<std::uint32_t>(map.get_int("cam_width", 224));
  cfg.val_fraction = map.get_double("val_fraction", 0.125);
  if (!(cfg.val_fraction >= 0.0 && cfg.val_fraction < 1.0))
    throw ParseError("config key 'val_fraction': must be in [0,1)");

  cfg.train.learning_rate = map.get_double("train.learning_rate", 1e-5);
  cfg.train.weight_decay = map.get_double("train.weight_decay", 5e-4);
  cfg.train.beta1 = map.get_double("train.beta1", 0.9);
  cfg.train.beta2 = map.get_double("train.beta2", 0.999);
  cfg.train.epsilon = map.get_double("train.epsilon", 1e-8);
  cfg.train.max_epochs = map.get_int("train.max_epochs", 200);
  cfg.train.risk_set_inclusive = map.get_bool("train.risk_set_inclusive", true);
  cfg.train.seed = cfg.seed;

  cfg.train_completer = map.get_bool("completer.train", false);
  cfg.completer.batch_size = map.get_int("completer.batch_size", 2000);
  cfg.completer.learning_rate = map.get_double("completer.learning_rate", 1e-3);
  cfg.completer.epochs = map.get_int("completer.epochs", 30);
  cfg.completer.hidden_dim = map.get_int("completer.hidden_dim", 256);
  cfg.completer.mask_fraction_low = map.get_double("completer.mask_low", 0.1);
  cfg.completer.mask_fraction_high = map.get_double("completer.mask_high", 0.5);
  cfg.completer.seed = derive_seed(cfg.seed, 0xC0);

  cfg.synth.n_subjects = map.get_int("synth.n_subjects", 100);
  cfg.synth.channels = static_cast<std::uint32_t>(map.get_int("synth.channels", 4));
  cfg.synth.height = static_cast<std::uint32_t>(map.get_int("synth.height", 32));
  cfg.synth.width = static_cast<std::uint32_t>(map.get_int("synth.width", 32));
  cfg.synth.lesion_region_index = map.get_int("synth.lesion_region", -1);
  cfg.synth.lesion_channel = map.get_int("synth.lesion_channel", 0);
  cfg.synth.true_weights = parse_weight_list(map, "synth.true_weights");
  cfg.synth.baseline_hazard = map.get_double("synth.baseline_hazard", 0.05);
  cfg.synth.censor_rate = map.get_double("synth.censor_rate", 0.0);
  cfg.synth.layout_jitter = map.get_double("synth.layout_jitter", 0.01);
  cfg.synth.background_std = map.get_double("synth.background_std", 0.2);
  cfg.synth.undetected_per_case = map.get_int("synth.undetected_per_case", 0);
  cfg.synth.seed = cfg.seed;
  return cfg;
}

namespace {

struct SubjectError {
  std::string subject_id;
  std::string stage;
  std::string message;
};

void write_manifest(const RunConfig& cfg, const std::string& command,
                    const std::map<std::string, std::int64_t>& counts,
                    const std::vector<std::string>& warnings,
                    const std::vector<SubjectError>& errors) {
  json jcounts = json::object();
  for (const auto& [k, v] : counts) jcounts[k] = v;
  json jconfig = json::object();
  for (const auto& [k, v] : cfg.raw.values()) jconfig[k] = v;
  const json manifest{{"command", command},
                      {"seed", cfg.seed},
                      {"counts", std::move(jcounts)},
                      {"warnings", warnings},
                      {"subject_errors", errors.size()},
                      {"config", std::move(jconfig)}};
  std::ofstream out(cfg.out_dir / ("manifest_" + command + ".json"), std::ios::trunc);
  if (!out) throw IoError("cannot write manifest for " + command);
  out << manifest.dump(2) << '\n';
}

void write_errors_sidecar(const RunConfig& cfg, const std::string& command,
                          const std::vector<SubjectError>& errors) {
  std::ofstream out(cfg.out_dir / ("errors_" + command + ".csv"), std::ios::trunc);
  if (!out) throw IoError("cannot write errors sidecar for " + command);
  out << "subject_id,stage,message\n";
  for (const auto& e : errors) {
    std::string msg = e.message;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    out << e.subject_id << ',' << e.stage << ',' << msg << '\n';
  }
}

RunResult finish(const RunConfig& cfg, const std::string& command,
                 std::map<std::string, std::int64_t> counts, std::vector<std::string> warnings,
                 const std::vector<SubjectError>& errors, int total) {
  counts["subjects_failed"] = static_cast<std::int64_t>(errors.size());
  write_errors_sidecar(cfg, command, errors);
  write_manifest(cfg, command, counts, warnings, errors);
  RunResult res;
  res.subjects_total = total;
  res.subjects_failed = static_cast<int>(errors.size());
  res.status = errors.empty() ? RunStatus::ok : RunStatus::partial;
  res.messages = std::move(warnings);
  return res;
}

std::filesystem::path feature_path(const RunConfig& cfg, const std::string& id) {
  return cfg.features_dir / (id + ".fmap");
}

std::filesystem::path box_path(const std::filesystem::path& dir, const std::string& id) {
  return dir / (id + ".json");
}

}  // namespace

RunResult run_synth(const RunConfig& cfg) {
  const Cohort cohort = gen_cohort(cfg.synth, cfg.region_names);
  std::filesystem::create_directories(cfg.out_dir);
  std::filesystem::create_directories(cfg.features_dir);
  std::filesystem::create_directories(cfg.boxes_dir);

  std::vector<SurvivalRecord> records;
  std::ofstream truth(cfg.out_dir / "truth.csv", std::ios::trunc);
  if (!truth) throw IoError("cannot write truth.csv");
  truth << "subject_id,true_eta,lesion_region\n";
  for (const auto& s : cohort.subjects) {
    write_feature_map(feature_path(cfg, s.subject_id), s.features);
    write_region_set_json(box_path(cfg.boxes_dir, s.subject_id), s.subject_id, s.regions);
    records.push_back(s.record);
    truth << s.subject_id << ',' << format_double(s.true_eta) << ',' << s.lesion_region << '\n';
  }
  write_labels_csv(cfg.labels_path, records);

  int events = 0;
  for (const auto& r : records) events += r.event ? 1 : 0;
  return finish(cfg, "synth",
                {{"subjects", cfg.synth.n_subjects}, {"events", events}},
                cohort.warnings, {}, cfg.synth.n_subjects);
}

namespace {

struct LoadedCohort {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> pooled;
  std::vector<SurvivalRecord> records;
  std::vector<SubjectError> errors;
  std::vector<FeatureMap> maps;  // filled only when keep_maps
};

LoadedCohort load_features(const RunConfig& cfg, bool keep_maps) {
  LoadedCohort out;
  const std::vector<SurvivalRecord> labels = read_labels_csv(cfg.labels_path);
  for (const auto& rec : labels) {
    const std::filesystem::path fpath = feature_path(cfg, rec.subject_id);
    try {
      FeatureMap fm = read_feature_map(fpath);
      out.pooled.push_back(avg_pool(fm));
      if (keep_maps) out.maps.push_back(std::move(fm));
      out.ids.push_back(rec.subject_id);
      out.records.push_back(rec);
    } catch (const std::exception& e) {
      out.errors.push_back({rec.subject_id, "features", e.what()});
    }
  }
  return out;
}

// event-stratified split; preserves the event ratio within one subject
void split_train_val(const LoadedCohort& cohort, double val_fraction, std::uint64_t seed,
                     std::vector<std::size_t>& train_idx, std::vector<std::size_t>& val_idx) {
  std::vector<std::size_t> events, censored;
  for (std::size_t i = 0; i < cohort.records.size(); ++i)
    (cohort.records[i].event ? events : censored).push_back(i);
  Rng rng(seed, 0xA1);
  rng.shuffle(events);
  rng.shuffle(censored);
  const auto n_val_events = static_cast<std::size_t>(
      std::lround(val_fraction * static_cast<double>(events.size())));
  const auto n_val_censored = static_cast<std::size_t>(
      std::lround(val_fraction * static_cast<double>(censored.size())));
  for (std::size_t i = 0; i < events.size(); ++i)
    (i < n_val_events ? val_idx : train_idx).push_back(events[i]);
  for (std::size_t i = 0; i < censored.size(); ++i)
    (i < n_val_censored ? val_idx : train_idx).push_back(censored[i]);
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());
}

}  // namespace

RunResult run_train(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  LoadedCohort cohort = load_features(cfg, false);
  const int total_subjects = static_cast<int>(cohort.records.size() + cohort.errors.size());
  std::vector<std::string> warnings;
  if (cohort.records.size() < 2)
    throw std::invalid_argument("train: need at least two subjects with features");

  std::vector<std::size_t> train_idx, val_idx;
  split_train_val(cohort, cfg.val_fraction, cfg.seed, train_idx, val_idx);

  auto gather = [&](const std::vector<std::size_t>& idx,
                    std::vector<std::vector<double>>& feats, std::vector<SurvivalRecord>& recs) {
    for (std::size_t i : idx) {
      feats.push_back(cohort.pooled[i]);
      recs.push_back(cohort.records[i]);
    }
  };
  std::vector<std::vector<double>> train_f, val_f;
  std::vector<SurvivalRecord> train_r, val_r;
  gather(train_idx, train_f, train_r);
  gather(val_idx, val_f, val_r);

  const auto count_events = [](const std::vector<SurvivalRecord>& rs) {
    int n = 0;
    for (const auto& r : rs) n += r.event ? 1 : 0;
    return n;
  };
  if (count_events(train_r) == 0) throw NoEventsError("train: no events in training split");
  if (!val_r.empty() && (val_r.size() < 2 || count_events(val_r) == 0)) {
    // a lone subject or an event-free split makes the validation loss
    // constant or undefined; fall back to training-loss selection
    warnings.push_back("validation split unusable (" + std::to_string(val_r.size()) +
                       " subjects, " + std::to_string(count_events(val_r)) +
                       " events); selecting on training loss");
    val_f.clear();
    val_r.clear();
  }

  const FitResult fitres = fit(train_f, train_r, val_f, val_r, cfg.train);
  for (const auto& w : fitres.warnings) warnings.push_back(w);
  write_risk_head_json(cfg.model_path, fitres.head);

  {
    std::ofstream trace(cfg.out_dir / "trace.csv", std::ios::trunc);
    if (!trace) throw IoError("cannot write trace.csv");
    trace << "epoch,train_loss,val_loss\n";
    for (std::size_t e = 0; e < fitres.loss_trace.size(); ++e) {
      trace << e << ',' << format_double(fitres.loss_trace[e]) << ',';
      if (e < fitres.val_loss_trace.size()) trace << format_double(fitres.val_loss_trace[e]);
      trace << '\n';
    }
  }

  std::map<std::string, std::int64_t> counts{
      {"subjects", static_cast<std::int64_t>(cohort.records.size())},
      {"train_subjects", static_cast<std::int64_t>(train_r.size())},
      {"val_subjects", static_cast<std::int64_t>(val_r.size())},
      {"train_events", count_events(train_r)},
      {"best_epoch", fitres.best_epoch}};

  if (cfg.train_completer) {
    std::vector<LayoutCoords> layouts;
    for (const auto& id : cohort.ids) {
      const std::filesystem::path bpath = box_path(cfg.boxes_dir, id);
      if (!std::filesystem::exists(bpath)) continue;
      try {
        const BoxFile bf = read_box_file(bpath, cfg.region_names);
        if (!bf.regions) continue;
        const bool all_detected = std::all_of(bf.regions->boxes.begin(), bf.regions->boxes.end(),
                                              [](const RegionBox& b) { return b.detected; });
        if (all_detected) layouts.push_back(region_set_coords(*bf.regions));
      } catch (const std::exception& e) {
        cohort.errors.push_back({id, "completer-layouts", e.what()});
      }
    }
    if (layouts.empty()) {
      warnings.push_back("completer training requested but no fully-detected box sets found");
    } else {
      const CompleterFitResult cres = completer_train(layouts, cfg.completer);
      write_completer_json(cfg.completer_path, cres.net);
      counts["completer_layouts"] = static_cast<std::int64_t>(layouts.size());
    }
  }

  return finish(cfg, "train", std::move(counts), std::move(warnings), cohort.errors,
                total_subjects);
}

RunResult run_predict(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  const RiskHead head = read_risk_head_json(cfg.model_path);
  const std::vector<SurvivalRecord> labels = read_labels_csv(cfg.labels_path);

  std::vector<SubjectError> errors;
  std::ofstream out(cfg.predictions_path, std::ios::trunc);
  if (!out) throw IoError("cannot write predictions: " + cfg.predictions_path.string());
  out << "subject_id,risk\n";
  int written = 0;
  for (const auto& rec : labels) {
    try {
      const FeatureMap fm = read_feature_map(feature_path(cfg, rec.subject_id));
      out << rec.subject_id << ',' << format_double(predict_risk(head, avg_pool(fm))) << '\n';
      ++written;
    } catch (const std::exception& e) {
      errors.push_back({rec.subject_id, "predict", e.what()});
    }
  }
  return finish(cfg, "predict", {{"subjects", static_cast<std::int64_t>(labels.size())},
                                 {"predicted", written}},
                {}, errors, static_cast<int>(labels.size()));
}

RunResult run_cam(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  const std::filesystem::path cam_dir = cfg.out_dir / "cam";
  std::filesystem::create_directories(cam_dir);
  const RiskHead head = read_risk_head_json(cfg.model_path);
  const std::vector<SurvivalRecord> labels = read_labels_csv(cfg.labels_path);

  std::vector<SubjectError> errors;
  int written = 0;
  for (const auto& rec : labels) {
    try {
      const FeatureMap fm = read_feature_map(feature_path(cfg, rec.subject_id));
      const ActivationMap cam = upsample_bilinear(risk_cam(fm, head), cfg.cam_height, cfg.cam_width);
      write_pgm(cam_dir / (rec.subject_id + ".pgm"), normalize_unit_range(cam));
      // raw sidecar keeps unquantized values for downstream arithmetic
      FeatureMap raw(1, cam.height, cam.width);
      for (std::size_t k = 0; k < cam.values.size(); ++k)
        raw.values[k] = static_cast<float>(cam.values[k]);
      write_feature_map(cam_dir / (rec.subject_id + "_raw.fmap"), raw);
      ++written;
    } catch (const std::exception& e) {
      errors.push_back({rec.subject_id, "cam", e.what()});
    }
  }
  return finish(cfg, "cam", {{"subjects", static_cast<std::int64_t>(labels.size())},
                             {"heatmaps", written}},
                {}, errors, static_cast<int>(labels.size()));
}

namespace {

RegionSet load_subject_regions(const RunConfig& cfg, const std::string& id,
                               const CompleterNet* completer,
                               std::vector<std::string>* warnings) {
  const std::filesystem::path completed = box_path(cfg.completed_dir, id);
  const std::filesystem::path raw = box_path(cfg.boxes_dir, id);
  const std::filesystem::path chosen = std::filesystem::exists(completed) ? completed : raw;

  const BoxFile bf = read_box_file(chosen, cfg.region_names);
  RegionSet rs = bf.proposals ? select_regions(*bf.proposals, cfg.region_names) : *bf.regions;
  // completed sets keep detected=false for provenance but carry usable
  // coordinates; only degenerate placeholder boxes still need the completer
  const bool any_unusable = std::any_of(rs.boxes.begin(), rs.boxes.end(), [](const RegionBox& b) {
    return !(b.x1 < b.x2 && b.y1 < b.y2);
  });
  if (!any_unusable) return rs;
  if (!completer)
    throw std::invalid_argument("undetected regions present and no completer model available");
  CompletionResult res = complete(rs, *completer);
  if (warnings)
    for (auto& w : res.warnings) warnings->push_back(id + ": " + w);
  return std::move(res.set);
}

}  // namespace

RunResult run_complete(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  std::filesystem::create_directories(cfg.completed_dir);
  const CompleterNet net = read_completer_json(cfg.completer_path);
  const std::vector<SurvivalRecord> labels = read_labels_csv(cfg.labels_path);

  std::vector<SubjectError> errors;
  std::vector<std::string> warnings;
  int completed_boxes = 0, written = 0;
  for (const auto& rec : labels) {
    try {
      const BoxFile bf = read_box_file(box_path(cfg.boxes_dir, rec.subject_id), cfg.region_names);
      const RegionSet rs =
          bf.proposals ? select_regions(*bf.proposals, cfg.region_names) : *bf.regions;
      CompletionResult res = complete(rs, net);
      for (auto& w : res.warnings) warnings.push_back(rec.subject_id + ": " + w);
      for (std::size_t k = 0; k < rs.boxes.size(); ++k)
        completed_boxes += (!rs.boxes[k].detected) ? 1 : 0;
      write_region_set_json(box_path(cfg.completed_dir, rec.subject_id), rec.subject_id, res.set);
      ++written;
    } catch (const std::exception& e) {
      errors.push_back({rec.subject_id, "complete", e.what()});
    }
  }
  return finish(cfg, "complete",
                {{"subjects", static_cast<std::int64_t>(labels.size())},
                 {"written", written},
                 {"boxes_completed", completed_boxes}},
                std::move(warnings), errors, static_cast<int>(labels.size()));
}

RunResult run_report(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  const std::filesystem::path report_dir = cfg.out_dir / "reports";
  std::filesystem::create_directories(report_dir);
  const RiskHead head = read_risk_head_json(cfg.model_path);
  const std::vector<SurvivalRecord> labels = read_labels_csv(cfg.labels_path);

  CompleterNet completer;
  bool have_completer = false;
  if (std::filesystem::exists(cfg.completer_path)) {
    completer = read_completer_json(cfg.completer_path);
    have_completer = true;
  }

  std::vector<SubjectError> errors;
  std::vector<std::string> warnings;
  int written = 0;
  for (const auto& rec : labels) {
    try {
      const FeatureMap fm = read_feature_map(feature_path(cfg, rec.subject_id));
      const RegionSet rs = load_subject_regions(cfg, rec.subject_id,
                                                have_completer ? &completer : nullptr, &warnings);
      const double risk = predict_risk(head, avg_pool(fm));
      const ActivationMap cam = upsample_bilinear(risk_cam(fm, head), cfg.cam_height, cfg.cam_width);
      const RegionalRiskReport report = regional_report(cam, rs, risk);
      write_report_json(report_dir / (rec.subject_id + ".json"), rec.subject_id, report, cfg.top_k);
      write_report_csv(report_dir / (rec.subject_id + ".csv"), report);
      ++written;
    } catch (const std::exception& e) {
      errors.push_back({rec.subject_id, "report", e.what()});
    }
  }
  return finish(cfg, "report", {{"subjects", static_cast<std::int64_t>(labels.size())},
                                {"reports", written}},
                std::move(warnings), errors, static_cast<int>(labels.size()));
}

RunResult run_evaluate(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  const std::vector<SurvivalRecord> labels = read_labels_csv(cfg.labels_path);

  // predictions CSV: subject_id,risk
  std::map<std::string, double> risk_by_id;
  {
    std::ifstream in(cfg.predictions_path);
    if (!in) throw IoError("cannot open predictions: " + cfg.predictions_path.string());
    std::string line;
    if (!std::getline(in, line)) throw ParseError("predictions: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "subject_id,risk") throw ParseError("predictions: unexpected header");
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw ParseError("predictions: malformed row");
      char* end = nullptr;
      const std::string num = line.substr(comma + 1);
      const double risk = std::strtod(num.c_str(), &end);
      if (end == num.c_str() || *end != '\0') throw ParseError("predictions: bad risk value");
      risk_by_id[line.substr(0, comma)] = risk;
    }
  }

  std::vector<double> risks;
  std::vector<SurvivalRecord> scored;
  for (const auto& rec : labels) {
    const auto it = risk_by_id.find(rec.subject_id);
    if (it == risk_by_id.end()) continue;
    risks.push_back(it->second);
    scored.push_back(rec);
  }
  if (scored.size() < 2)
    throw std::invalid_argument("evaluate: need at least two scored subjects");

  const double cidx = c_index(risks, scored);
  const double tauc = time_dependent_auc(risks, scored, cfg.horizon);

  const std::vector<RiskGroup> groups = stratify_by_median(risks);
  std::vector<SurvivalRecord> high, low;
  for (std::size_t i = 0; i < scored.size(); ++i)
    (groups[i] == RiskGroup::high ? high : low).push_back(scored[i]);
  const LogRankResult lr = log_rank(high, low);
  write_km_curves_csv(cfg.out_dir / "km_curves.csv",
                      {{"high", km_curve(high)}, {"low", km_curve(low)}});

  int events = 0;
  for (const auto& r : scored) events += r.event ? 1 : 0;
  const json metrics{{"c_index", cidx},
                     {"t_auc", tauc},
                     {"horizon_days", cfg.horizon},
                     {"log_rank", {{"chi_square", lr.chi_square}, {"p_value", lr.p_value}}},
                     {"n_labels", labels.size()},
                     {"n_scored", scored.size()},
                     {"n_events", events},
                     {"n_high", high.size()},
                     {"n_low", low.size()}};
  {
    std::ofstream out(cfg.out_dir / "metrics.json", std::ios::trunc);
    if (!out) throw IoError("cannot write metrics.json");
    out << metrics.dump(2) << '\n';
  }

  RunResult res = finish(cfg, "evaluate",
                         {{"n_scored", static_cast<std::int64_t>(scored.size())},
                          {"n_events", events}},
                         {}, {}, static_cast<int>(scored.size()));
  res.messages.push_back("c_index=" + format_double(cidx) + " t_auc=" + format_double(tauc) +
                         " log_rank_p=" + format_double(lr.p_value));
  return res;
}

}  // namespace cxrisk
