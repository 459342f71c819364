#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cxrisk/metrics.hpp"
#include "cxrisk/region.hpp"
#include "cxrisk/regional.hpp"
#include "cxrisk/survival.hpp"

namespace cxrisk {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

// ---- feature maps ----------------------------------------------------------
//
// FMAP binary layout: magic "FMAP", one format-version byte (1), three 32-bit
// little-endian unsigned dims (C, H, W), then C*H*W IEEE-754 binary32 values
// in little-endian byte order, channel-major and row-major within a channel.

void write_feature_map(const std::filesystem::path& path, const FeatureMap& fm);
FeatureMap read_feature_map(const std::filesystem::path& path);

// ---- survival labels -------------------------------------------------------
//
// CSV with the exact header "subject_id,time_days,event"; event is 0 or 1.

void write_labels_csv(const std::filesystem::path& path, const std::vector<SurvivalRecord>& records);
std::vector<SurvivalRecord> read_labels_csv(const std::filesystem::path& path);

// ---- boxes and proposals ---------------------------------------------------
//
// A box file carries either a full region set:
//   {"subject_id": "...", "regions": [{"name", "x1","y1","x2","y2",
//    "detected", "score"?} x29]}
// or raw detector proposals:
//   {"subject_id": "...", "proposals": [{"x1","y1","x2","y2",
//    "scores": [29 reals]} ...]}
// Coordinates are always normalized to [0,1]; "score" is present iff
// "detected" is true.

struct BoxFile {
  std::string subject_id;
  std::optional<RegionSet> regions;
  std::optional<ProposalSet> proposals;
};

void write_region_set_json(const std::filesystem::path& path, const std::string& subject_id,
                           const RegionSet& rs);
void write_proposal_set_json(const std::filesystem::path& path, const std::string& subject_id,
                             const ProposalSet& ps);
BoxFile read_box_file(const std::filesystem::path& path, const std::vector<std::string>& names);

// ---- risk head and completer models ----------------------------------------

void write_risk_head_json(const std::filesystem::path& path, const RiskHead& head);
RiskHead read_risk_head_json(const std::filesystem::path& path);
void write_completer_json(const std::filesystem::path& path, const CompleterNet& net);
CompleterNet read_completer_json(const std::filesystem::path& path);

// ---- reports, heatmaps, curves ----------------------------------------------

void write_report_json(const std::filesystem::path& path, const std::string& subject_id,
                       const RegionalRiskReport& report, int top_k_entries);
void write_report_csv(const std::filesystem::path& path, const RegionalRiskReport& report);

// 8-bit binary portable graymap; expects values already in [0,1].
void write_pgm(const std::filesystem::path& path, const ActivationMap& normalized);

void write_km_curves_csv(const std::filesystem::path& path,
                         const std::vector<std::pair<std::string, KMCurve>>& curves);

// ---- run configuration ------------------------------------------------------
//
// Flat "key = value" file; '#' starts a comment, values may be quoted,
// list values are comma-separated. Later assignments win, as do flag
// overrides applied on top.

class ConfigMap {
 public:
  void load_file(const std::filesystem::path& path);
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace cxrisk
