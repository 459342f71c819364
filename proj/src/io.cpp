#include "cxrisk/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cxrisk {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = {}) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = {}) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

void put_u32_le(std::string& buf, std::uint32_t v) {
  buf.push_back(static_cast<char>(v & 0xff));
  buf.push_back(static_cast<char>((v >> 8) & 0xff));
  buf.push_back(static_cast<char>((v >> 16) & 0xff));
  buf.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t get_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

double parse_double_strict(const std::string& s, const std::string& what) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw ParseError(what + ": not a number: '" + s + "'");
  return v;
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return j;
}

void dump_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

void write_feature_map(const std::filesystem::path& path, const FeatureMap& fm) {
  validate(fm);
  std::string buf;
  buf.reserve(9 + 12 + fm.values.size() * 4);
  buf += "FMAP";
  buf.push_back(1);  // format version
  put_u32_le(buf, fm.channels);
  put_u32_le(buf, fm.height);
  put_u32_le(buf, fm.width);
  static_assert(sizeof(float) == 4);
  for (float v : fm.values) put_u32_le(buf, std::bit_cast<std::uint32_t>(v));
  std::ofstream out = open_out(path, std::ios::binary);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

FeatureMap read_feature_map(const std::filesystem::path& path) {
  std::ifstream in = open_in(path, std::ios::binary);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() < 17 || data.compare(0, 4, "FMAP") != 0)
    throw ParseError(path.string() + ": not an FMAP file");
  if (data[4] != 1) throw ParseError(path.string() + ": unsupported FMAP version");
  const auto* p = reinterpret_cast<const unsigned char*>(data.data());
  FeatureMap fm;
  fm.channels = get_u32_le(p + 5);
  fm.height = get_u32_le(p + 9);
  fm.width = get_u32_le(p + 13);
  const std::uint64_t count =
      static_cast<std::uint64_t>(fm.channels) * fm.height * fm.width;
  if (data.size() != 17 + count * 4)
    throw ParseError(path.string() + ": size does not match dimensions");
  fm.values.resize(count);
  for (std::uint64_t k = 0; k < count; ++k)
    fm.values[k] = std::bit_cast<float>(get_u32_le(p + 17 + k * 4));
  validate(fm);
  return fm;
}

void write_labels_csv(const std::filesystem::path& path, const std::vector<SurvivalRecord>& records) {
  std::ofstream out = open_out(path);
  out << "subject_id,time_days,event\n";
  for (const auto& r : records) {
    if (r.subject_id.empty() || r.subject_id.find(',') != std::string::npos ||
        r.subject_id.find('\n') != std::string::npos)
      throw IoError("labels: subject id unusable in CSV: '" + r.subject_id + "'");
    out << r.subject_id << ',' << format_double(r.time_days) << ',' << (r.event ? 1 : 0) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<SurvivalRecord> read_labels_csv(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "subject_id,time_days,event")
    throw ParseError(path.string() + ": unexpected header '" + line + "'");
  std::vector<SurvivalRecord> records;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos)
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected three fields");
    SurvivalRecord r;
    r.subject_id = line.substr(0, c1);
    r.time_days = parse_double_strict(line.substr(c1 + 1, c2 - c1 - 1), path.string() + " time_days");
    const std::string ev = line.substr(c2 + 1);
    if (ev == "1") r.event = true;
    else if (ev == "0") r.event = false;
    else throw ParseError(path.string() + ":" + std::to_string(lineno) + ": event must be 0 or 1");
    if (r.subject_id.empty())
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": empty subject id");
    if (!std::isfinite(r.time_days) || r.time_days <= 0.0)
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": time_days must be > 0");
    records.push_back(std::move(r));
  }
  return records;
}

void write_region_set_json(const std::filesystem::path& path, const std::string& subject_id,
                           const RegionSet& rs) {
  json regions = json::array();
  for (const auto& b : rs.boxes) {
    json jb{{"name", b.name}, {"x1", b.x1}, {"y1", b.y1}, {"x2", b.x2},
            {"y2", b.y2}, {"detected", b.detected}};
    if (b.score) jb["score"] = *b.score;
    regions.push_back(std::move(jb));
  }
  dump_json(path, json{{"subject_id", subject_id}, {"regions", std::move(regions)}});
}

void write_proposal_set_json(const std::filesystem::path& path, const std::string& subject_id,
                             const ProposalSet& ps) {
  json proposals = json::array();
  for (const auto& p : ps.proposals)
    proposals.push_back(json{{"x1", p.x1}, {"y1", p.y1}, {"x2", p.x2}, {"y2", p.y2},
                             {"scores", p.scores}});
  dump_json(path, json{{"subject_id", subject_id}, {"proposals", std::move(proposals)}});
}

BoxFile read_box_file(const std::filesystem::path& path, const std::vector<std::string>& names) {
  const json j = load_json(path);
  BoxFile file;
  try {
    file.subject_id = j.at("subject_id").get<std::string>();
    if (j.contains("regions") == j.contains("proposals"))
      throw ParseError(path.string() + ": expected exactly one of 'regions' or 'proposals'");
    if (j.contains("regions")) {
      RegionSet rs;
      for (const auto& jb : j.at("regions")) {
        RegionBox b;
        b.name = jb.at("name").get<std::string>();
        b.x1 = jb.at("x1").get<double>();
        b.y1 = jb.at("y1").get<double>();
        b.x2 = jb.at("x2").get<double>();
        b.y2 = jb.at("y2").get<double>();
        b.detected = jb.at("detected").get<bool>();
        if (jb.contains("score")) b.score = jb.at("score").get<double>();
        rs.boxes.push_back(std::move(b));
      }
      // boxes must cover the configured names exactly, in any file order;
      // reorder to the configured sequence
      if (rs.boxes.size() != names.size())
        throw ParseError(path.string() + ": expected 29 regions");
      RegionSet ordered;
      for (const auto& name : names) {
        const auto it = std::find_if(rs.boxes.begin(), rs.boxes.end(),
                                     [&](const RegionBox& b) { return b.name == name; });
        if (it == rs.boxes.end())
          throw ParseError(path.string() + ": missing region '" + name + "'");
        ordered.boxes.push_back(*it);
      }
      validate(ordered);
      file.regions = std::move(ordered);
    } else {
      ProposalSet ps;
      for (const auto& jp : j.at("proposals")) {
        Proposal p;
        p.x1 = jp.at("x1").get<double>();
        p.y1 = jp.at("y1").get<double>();
        p.x2 = jp.at("x2").get<double>();
        p.y2 = jp.at("y2").get<double>();
        p.scores = jp.at("scores").get<std::vector<double>>();
        ps.proposals.push_back(std::move(p));
      }
      file.proposals = std::move(ps);
    }
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return file;
}

void write_risk_head_json(const std::filesystem::path& path, const RiskHead& head) {
  dump_json(path, json{{"format", "cxrisk-head"},
                       {"channels", head.weights.size()},
                       {"weights", head.weights},
                       {"bias", head.bias}});
}

RiskHead read_risk_head_json(const std::filesystem::path& path) {
  const json j = load_json(path);
  RiskHead head;
  try {
    if (j.at("format").get<std::string>() != "cxrisk-head")
      throw ParseError(path.string() + ": not a risk-head file");
    head.weights = j.at("weights").get<std::vector<double>>();
    head.bias = j.at("bias").get<double>();
    if (j.at("channels").get<std::size_t>() != head.weights.size())
      throw ParseError(path.string() + ": channel count mismatch");
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  for (double w : head.weights)
    if (!std::isfinite(w)) throw ParseError(path.string() + ": non-finite weight");
  if (!std::isfinite(head.bias)) throw ParseError(path.string() + ": non-finite bias");
  return head;
}

void write_completer_json(const std::filesystem::path& path, const CompleterNet& net) {
  dump_json(path, json{{"format", "cxrisk-completer"},
                       {"input_dim", net.input_dim},
                       {"hidden_dim", net.hidden_dim},
                       {"output_dim", net.output_dim},
                       {"w1", net.w1}, {"b1", net.b1},
                       {"w2", net.w2}, {"b2", net.b2},
                       {"w3", net.w3}, {"b3", net.b3}});
}

CompleterNet read_completer_json(const std::filesystem::path& path) {
  const json j = load_json(path);
  CompleterNet net;
  try {
    if (j.at("format").get<std::string>() != "cxrisk-completer")
      throw ParseError(path.string() + ": not a completer file");
    net.input_dim = j.at("input_dim").get<std::uint32_t>();
    net.hidden_dim = j.at("hidden_dim").get<std::uint32_t>();
    net.output_dim = j.at("output_dim").get<std::uint32_t>();
    net.w1 = j.at("w1").get<std::vector<double>>();
    net.b1 = j.at("b1").get<std::vector<double>>();
    net.w2 = j.at("w2").get<std::vector<double>>();
    net.b2 = j.at("b2").get<std::vector<double>>();
    net.w3 = j.at("w3").get<std::vector<double>>();
    net.b3 = j.at("b3").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return net;
}

void write_report_json(const std::filesystem::path& path, const std::string& subject_id,
                       const RegionalRiskReport& report, int top_k_entries) {
  json entries = json::array();
  for (const auto& e : report.entries)
    entries.push_back(json{{"name", e.name},
                           {"activation_sum", e.activation_sum},
                           {"intensity_fraction", e.intensity_fraction},
                           {"regional_risk", e.regional_risk},
                           {"rank", e.rank}});
  json top = json::array();
  for (int k = 0; k < top_k_entries && k < static_cast<int>(report.entries.size()); ++k)
    top.push_back(report.entries[static_cast<std::size_t>(k)].name);
  dump_json(path, json{{"subject_id", subject_id},
                       {"global_risk", report.global_risk},
                       {"entries", std::move(entries)},
                       {"top_regions", std::move(top)}});
}

void write_report_csv(const std::filesystem::path& path, const RegionalRiskReport& report) {
  std::ofstream out = open_out(path);
  out << "rank,name,activation_sum,intensity_fraction,regional_risk\n";
  for (const auto& e : report.entries)
    out << e.rank << ',' << e.name << ',' << format_double(e.activation_sum) << ','
        << format_double(e.intensity_fraction) << ',' << format_double(e.regional_risk) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

void write_pgm(const std::filesystem::path& path, const ActivationMap& normalized) {
  std::ofstream out = open_out(path, std::ios::binary);
  out << "P5\n" << normalized.width << ' ' << normalized.height << "\n255\n";
  std::string bytes;
  bytes.reserve(normalized.values.size());
  for (double v : normalized.values) {
    const double clamped = std::clamp(v, 0.0, 1.0);
    bytes.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(clamped * 255.0))));
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

void write_km_curves_csv(const std::filesystem::path& path,
                         const std::vector<std::pair<std::string, KMCurve>>& curves) {
  std::ofstream out = open_out(path);
  out << "group,time,survival,at_risk,events\n";
  for (const auto& [group, curve] : curves)
    for (std::size_t k = 0; k < curve.times.size(); ++k)
      out << group << ',' << format_double(curve.times[k]) << ','
          << format_double(curve.survival[k]) << ',' << curve.at_risk[k] << ','
          << curve.events[k] << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

void ConfigMap::load_file(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    if (key.empty())
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": empty key");
    values_[key] = value;
  }
}

void ConfigMap::set(const std::string& key, const std::string& value) { values_[key] = value; }

bool ConfigMap::has(const std::string& key) const { return values_.count(key) > 0; }

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return parse_double_strict(it->second, "config key '" + key + "'");
}

int ConfigMap::get_int(const std::string& key, int fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  int v = 0;
  const auto res = std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
  if (res.ec != std::errc{} || res.ptr != it->second.data() + it->second.size())
    throw ParseError("config key '" + key + "': not an integer: '" + it->second + "'");
  return v;
}

std::uint64_t ConfigMap::get_uint64(const std::string& key, std::uint64_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::uint64_t v = 0;
  const auto res = std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
  if (res.ec != std::errc{} || res.ptr != it->second.data() + it->second.size())
    throw ParseError("config key '" + key + "': not an unsigned integer: '" + it->second + "'");
  return v;
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ParseError("config key '" + key + "': not a boolean: '" + it->second + "'");
}

std::vector<std::string> ConfigMap::get_list(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return {};
  std::vector<std::string> items;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) items.push_back(t);
  }
  return items;
}

}  // namespace cxrisk
