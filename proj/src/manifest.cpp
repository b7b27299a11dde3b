#include "texturecrop/manifest.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <unordered_set>

#include "texturecrop/error.h"

namespace texturecrop {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return in;
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

std::string lower_ext(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

// Calls fn(json, line_number) for each non-blank line.
template <typename Fn>
void for_each_json_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError("line " + std::to_string(lineno) + ": " + e.what());
    }
    try {
      fn(j, lineno);
    } catch (const json::exception& e) {
      throw FormatError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

// RFC 4180-ish: commas separate, double quotes wrap fields, "" escapes.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  if (quoted) throw FormatError("unterminated quote in CSV line");
  for (auto& f : fields) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string{} : f.substr(b, e - b + 1);
  }
  return fields;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

int parse_label(const std::string& s, std::size_t lineno) {
  if (s == "0") return 0;
  if (s == "1") return 1;
  throw FormatError("line " + std::to_string(lineno) + ": label must be 0 or 1, got '" +
                    s + "'");
}

}  // namespace

std::filesystem::path DatasetManifest::resolve(const DatasetEntry& e) const {
  std::filesystem::path p(e.path);
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

std::string image_id_from_path(std::string_view path) {
  std::filesystem::path p{std::string(path)};
  std::string stem = (p.parent_path() / p.stem()).generic_string();
  while (!stem.empty() && (stem.front() == '/' || stem.front() == '.')) {
    stem.erase(stem.begin());
  }
  for (char& c : stem) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
                    c == '.';
    if (!ok) c = '_';
  }
  return stem.empty() ? std::string("image") : stem;
}

DatasetManifest parse_dataset_manifest(std::istream& in, bool jsonl,
                                       std::filesystem::path base_dir) {
  DatasetManifest m;
  m.base_dir = std::move(base_dir);
  auto add = [&](std::string path, int label, std::string subset,
                 std::size_t lineno) {
    if (path.empty()) {
      throw FormatError("line " + std::to_string(lineno) + ": empty path");
    }
    DatasetEntry e{std::move(path), label, std::move(subset), {}};
    e.image_id = image_id_from_path(e.path);
    m.entries.push_back(std::move(e));
  };

  if (jsonl) {
    for_each_json_line(in, [&](const json& j, std::size_t lineno) {
      const json& lab = j.at("label");
      const std::string label =
          lab.is_string() ? lab.get<std::string>() : lab.dump();
      add(j.at("path").get<std::string>(), parse_label(label, lineno),
          j.value("subset", std::string("default")), lineno);
    });
  } else {
    std::string line;
    std::size_t lineno = 0;
    int path_col = -1, label_col = -1, subset_col = -1;
    while (std::getline(in, line)) {
      ++lineno;
      if (is_blank(line)) continue;
      const auto fields = split_csv(line);
      if (path_col < 0) {
        for (int i = 0; i < static_cast<int>(fields.size()); ++i) {
          if (fields[i] == "path") path_col = i;
          if (fields[i] == "label") label_col = i;
          if (fields[i] == "subset") subset_col = i;
        }
        if (path_col < 0 || label_col < 0) {
          throw FormatError("dataset CSV header must contain path,label[,subset]");
        }
        continue;
      }
      const auto need = static_cast<std::size_t>(
          std::max({path_col, label_col, subset_col}) + 1);
      if (fields.size() < need) {
        throw FormatError("line " + std::to_string(lineno) + ": too few fields");
      }
      add(fields[path_col], parse_label(fields[label_col], lineno),
          subset_col >= 0 ? fields[subset_col] : std::string("default"), lineno);
    }
  }

  std::unordered_set<std::string> paths, ids;
  for (const auto& e : m.entries) {
    if (!paths.insert(e.path).second) {
      throw FormatError("duplicate dataset path '" + e.path + "'");
    }
    if (!ids.insert(e.image_id).second) {
      throw FormatError("image id '" + e.image_id + "' derived from '" + e.path +
                        "' collides with another entry");
    }
  }
  return m;
}

DatasetManifest read_dataset_manifest(const std::filesystem::path& path) {
  auto in = open_input(path);
  const std::string ext = lower_ext(path);
  return parse_dataset_manifest(in, ext == ".jsonl" || ext == ".json",
                                path.parent_path());
}

void write_dataset_csv(std::ostream& out, std::span<const DatasetEntry> entries) {
  out << "path,label,subset\n";
  for (const auto& e : entries) {
    out << csv_quote(e.path) << ',' << e.label << ',' << csv_quote(e.subset)
        << '\n';
  }
}

void write_crop_manifest(std::ostream& out, std::span<const CropSet> sets) {
  for (const auto& set : sets) {
    for (const auto& r : set.records) {
      ordered_json j;
      j["image_id"] = r.image_id;
      j["crop_id"] = r.crop_id;
      j["x"] = r.rect.x;
      j["y"] = r.rect.y;
      j["w"] = r.rect.w;
      j["h"] = r.rect.h;
      j["metric_kind"] = std::string(to_string(r.metric.kind));
      j["metric_value"] = r.metric.value;
      j["flipped"] = r.flipped;
      j["fallback"] = r.fallback;
      if (r.resize_to) {
        j["out_w"] = *r.resize_to;
        j["out_h"] = *r.resize_to;
      }
      out << j.dump() << '\n';
    }
  }
}

std::vector<CropSet> read_crop_manifest(std::istream& in) {
  std::vector<CropSet> sets;
  for_each_json_line(in, [&](const json& j, std::size_t lineno) {
    CropRecord r;
    r.image_id = j.at("image_id").get<std::string>();
    r.crop_id = j.at("crop_id").get<std::string>();
    r.rect = Rect{j.at("x").get<int>(), j.at("y").get<int>(),
                  j.at("w").get<int>(), j.at("h").get<int>()};
    const auto kind = parse_metric_kind(j.at("metric_kind").get<std::string>());
    if (!kind) {
      throw FormatError("line " + std::to_string(lineno) + ": unknown metric_kind");
    }
    r.metric = {*kind, j.at("metric_value").get<double>()};
    r.flipped = j.value("flipped", false);
    r.fallback = j.value("fallback", false);
    if (j.contains("out_w")) r.resize_to = j.at("out_w").get<int>();
    if (sets.empty() || sets.back().image_id != r.image_id) {
      CropSet s;
      s.image_id = r.image_id;
      sets.push_back(std::move(s));
    }
    sets.back().records.push_back(std::move(r));
    sets.back().total_candidates = sets.back().records.size();
  });
  return sets;
}

std::vector<CropSet> read_crop_manifest(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_crop_manifest(in);
}

void write_score_manifest(std::ostream& out, std::span<const ScoreRecord> scores) {
  for (const auto& s : scores) {
    ordered_json j;
    j["crop_id"] = s.crop_id;
    j["score"] = s.score;
    out << j.dump() << '\n';
  }
}

std::vector<ScoreRecord> read_score_manifest(std::istream& in) {
  std::vector<ScoreRecord> out;
  for_each_json_line(in, [&](const json& j, std::size_t) {
    out.push_back({j.at("crop_id").get<std::string>(), j.at("score").get<double>()});
  });
  return out;
}

std::vector<ScoreRecord> read_score_manifest(const std::filesystem::path& path) {
  auto in = open_input(path);
  if (lower_ext(path) != ".csv") return read_score_manifest(in);

  std::vector<ScoreRecord> out;
  std::string line;
  std::size_t lineno = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    const auto f = split_csv(line);
    if (header) {
      header = false;
      if (f.size() >= 2 && f[0] == "crop_id") continue;
    }
    if (f.size() < 2) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) +
                        ": expected crop_id,score");
    }
    try {
      out.push_back({f[0], std::stod(f[1])});
    } catch (const std::exception&) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) +
                        ": bad score '" + f[1] + "'");
    }
  }
  return out;
}

void write_aggregated_manifest(std::ostream& out,
                               std::span<const AggregatedScore> scores) {
  for (const auto& s : scores) {
    ordered_json j;
    j["image_id"] = s.image_id;
    j["score"] = s.score;
    j["n_crops"] = s.n_crops;
    j["method"] = s.method;
    out << j.dump() << '\n';
  }
}

std::vector<AggregatedScore> read_aggregated_manifest(std::istream& in) {
  std::vector<AggregatedScore> out;
  for_each_json_line(in, [&](const json& j, std::size_t) {
    out.push_back({j.at("image_id").get<std::string>(), j.at("score").get<double>(),
                   j.at("n_crops").get<std::size_t>(),
                   j.value("method", std::string{})});
  });
  return out;
}

std::vector<AggregatedScore> read_aggregated_manifest(
    const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_aggregated_manifest(in);
}

}  // namespace texturecrop
