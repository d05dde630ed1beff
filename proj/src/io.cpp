// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

#include "lbp/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "lbp/rng.hpp"

using nlohmann::json;

namespace lbp {

// ---- struct <-> json ----

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(EncoderConfig, dim, context_dim, hidden, prefix_dim,
                                                input_gain, seed)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ScenarioConfig, encoder, n_base, n_novel,
                                                n_distractor, train_images, infer_images,
                                                objects_per_image, proposals_per_object,
                                                clutter_per_image, sigma_feat, sigma_det,
                                                max_prototype_cos, hidden_frequency_skew,
                                                image_size, min_box, max_box, proposal_jitter,
                                                rpn_object_mean, rpn_object_std, rpn_clutter_mean,
                                                rpn_clutter_std, match_iou, prototype_budget, seed)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(BackgroundFilter, theta, gt_iou_cut, nms_iou)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TrainConfig, learning_rate, momentum, weight_decay,
                                                steps, batch_images, seed, tau, gamma, theta,
                                                lambda_bg, n_a, n_o, k_min, k_max, filter,
                                                pseudo_nms_iou, bcp, bod, baseline_mode,
                                                train_contexts, train_sub_background)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(EvalConfig, rectify, recall_threshold)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(GradcheckConfig, instances, taus, h, seed)

void to_json(json& j, const Combination& c) { j = to_string(c); }
void from_json(const json& j, Combination& c) { c = combination_from_string(j.get<std::string>()); }

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(AblationSpec, combinations, base_seed, repetitions)

void to_json(json& j, const Embedding& e) { j = e.values(); }
void from_json(const json& j, Embedding& e) { e = Embedding(j.get<std::vector<double>>()); }

void to_json(json& j, const Box& b) { j = json::array({b.x1, b.y1, b.x2, b.y2}); }
void from_json(const json& j, Box& b) {
  require(j.is_array() && j.size() == 4, ErrorCode::kFormat, "box must be [x1, y1, x2, y2]");
  b = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

void to_json(json& j, const CategoryRole& r) { j = to_string(r); }
void from_json(const json& j, CategoryRole& r) { r = category_role_from_string(j.get<std::string>()); }

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CategoryInfo, id, role, name_seed)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PrototypeEntry, category, embedding)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(GroundTruthBox, image, box, label)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ContextVector, category, values)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ConfusionRow, label, counts)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EvalReport, novel_top1, base_top1, novel_recall,
                                   recall_threshold, novel_instances, base_instances, columns,
                                   confusion, shrinking_factors, mean_shrinking_factor,
                                   bcp_branches, rlx_branches, rectified)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(AblationRow, combination, seed, n_estimated, initial_loss,
                                   final_loss, report)

namespace {

constexpr int kDatasetVersion = 1;
constexpr int kReportVersion = 1;

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, std::string(what) + ": " + e.what());
  }
}

template <typename T>
T get_as(const json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, std::string(what) + ": " + e.what());
  }
}

void check_keys(const json& in, const json& reference, const std::string& path) {
  require(in.is_object(), ErrorCode::kFormat, "config section '" + path + "' must be an object");
  for (const auto& [key, value] : in.items()) {
    const std::string sub = path.empty() ? key : path + "." + key;
    require(reference.contains(key), ErrorCode::kFormat, "unknown config key '" + sub + "'");
    if (reference[key].is_object()) check_keys(value, reference[key], sub);
  }
}

json lab_to_json(const LabConfig& c) {
  return json{{"scenario", c.scenario}, {"train", c.train}, {"eval", c.eval},
              {"ablation", c.ablation}, {"gradcheck", c.gradcheck}};
}

LabConfig lab_from_json(const json& j) {
  check_keys(j, lab_to_json(LabConfig{}), "");
  LabConfig c;
  if (j.contains("scenario")) c.scenario = get_as<ScenarioConfig>(j["scenario"], "scenario");
  if (j.contains("train")) c.train = get_as<TrainConfig>(j["train"], "train");
  if (j.contains("eval")) c.eval = get_as<EvalConfig>(j["eval"], "eval");
  if (j.contains("ablation")) c.ablation = get_as<AblationSpec>(j["ablation"], "ablation");
  if (j.contains("gradcheck")) c.gradcheck = get_as<GradcheckConfig>(j["gradcheck"], "gradcheck");
  return c;
}

std::uint64_t hash_json(const json& j) { return fnv1a64(j.dump()); }

std::uint64_t parse_hex64(const json& j, const char* what) {
  const std::string s = get_as<std::string>(j, what);
  require(s.size() == 16, ErrorCode::kFormat, std::string(what) + ": expected 16 hex digits");
  try {
    return std::stoull(s, nullptr, 16);
  } catch (const std::exception&) {
    fail(ErrorCode::kFormat, std::string(what) + ": not a hex number");
  }
}

void check_header(const json& j, const char* format, int version) {
  require(j.is_object() && j.value("format", "") == format, ErrorCode::kFormat,
          std::string("not a ") + format + " record");
  require(j.value("version", -1) == version, ErrorCode::kFormat,
          std::string(format) + ": unsupported version");
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

// ---- config ----

LabConfig parse_lab_config(const std::string& text) {
  return lab_from_json(parse_json(text, "config"));
}

std::string render_lab_config(const LabConfig& config) { return lab_to_json(config).dump(2) + "\n"; }

void apply_override(LabConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  require(eq != std::string::npos && eq > 0, ErrorCode::kInvalidArgument,
          "override must look like section.key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;
  }
  json j = lab_to_json(config);
  json* node = &j;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  require(parts.size() >= 2, ErrorCode::kInvalidArgument, "override must name section.key");
  for (std::size_t i = 0; i < parts.size(); ++i) {
    require(node->is_object() && node->contains(parts[i]), ErrorCode::kInvalidArgument,
            "unknown config key '" + path + "'");
    node = &(*node)[parts[i]];
  }
  *node = value;
  config = lab_from_json(j);
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t config_hash(const ScenarioConfig& config) { return hash_json(json(config)); }
std::uint64_t config_hash(const TrainConfig& config) { return hash_json(json(config)); }
std::uint64_t config_hash(const LabConfig& config) { return hash_json(lab_to_json(config)); }

std::uint64_t dataset_fingerprint(const Dataset& dataset) {
  return hash_json(json{{"config", dataset.config}, {"split", dataset.split}});
}

// ---- dataset ----

std::string render_dataset(const Dataset& ds) {
  std::string out;
  json header{{"format", "lbp-dataset"},
              {"version", kDatasetVersion},
              {"config_hash", hex64(config_hash(ds.config))},
              {"split", ds.split},
              {"image_count", ds.image_count},
              {"config", ds.config},
              {"categories", ds.categories},
              {"oracle", {{"prototypes", ds.oracle.prototypes}}}};
  out += header.dump() + "\n";
  for (const GroundTruthBox& g : ds.annotations) {
    out += json{{"type", "annotation"}, {"image", g.image}, {"box", g.box}, {"label", g.label}}.dump() + "\n";
  }
  for (const GroundTruthBox& g : ds.oracle.objects) {
    out += json{{"type", "oracle_object"}, {"image", g.image}, {"box", g.box}, {"label", g.label}}.dump() + "\n";
  }
  for (const Proposal& p : ds.proposals) {
    json r{{"type", "proposal"},
           {"id", p.id},
           {"image", p.image},
           {"box", p.box},
           {"rpn_score", p.rpn_score},
           {"w", p.detector_feature},
           {"I", p.clip_feature},
           {"gt_label", p.gt_label ? json(*p.gt_label) : json(nullptr)},
           {"oracle", {{"generative_label", p.oracle.generative_label}}}};
    out += r.dump() + "\n";
  }
  return out;
}

Dataset parse_dataset(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::kFormat, "dataset file is empty");
  const json header = parse_json(line, "dataset header");
  check_header(header, "lbp-dataset", kDatasetVersion);
  Dataset ds;
  ds.config = get_as<ScenarioConfig>(header.at("config"), "dataset config");
  require(parse_hex64(header.at("config_hash"), "config_hash") == config_hash(ds.config),
          ErrorCode::kFormat, "dataset config hash does not match its config");
  ds.split = get_as<std::string>(header.at("split"), "split");
  ds.image_count = get_as<std::size_t>(header.at("image_count"), "image_count");
  ds.categories = get_as<std::vector<CategoryInfo>>(header.at("categories"), "categories");
  ds.oracle.prototypes =
      get_as<std::vector<PrototypeEntry>>(header.at("oracle").at("prototypes"), "oracle prototypes");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const json r = parse_json(line, "dataset record");
    const std::string where = "dataset line " + std::to_string(lineno);
    try {
      const std::string type = r.at("type").get<std::string>();
      if (type == "annotation" || type == "oracle_object") {
        GroundTruthBox g{r.at("image").get<int>(), r.at("box").get<Box>(), r.at("label").get<int>()};
        (type == "annotation" ? ds.annotations : ds.oracle.objects).push_back(g);
      } else if (type == "proposal") {
        Proposal p;
        p.id = r.at("id").get<int>();
        p.image = r.at("image").get<int>();
        p.box = r.at("box").get<Box>();
        p.rpn_score = r.at("rpn_score").get<double>();
        p.detector_feature = r.at("w").get<Embedding>();
        p.clip_feature = r.at("I").get<Embedding>();
        if (!r.at("gt_label").is_null()) p.gt_label = r.at("gt_label").get<int>();
        p.oracle.generative_label = r.at("oracle").at("generative_label").get<int>();
        ds.proposals.push_back(std::move(p));
      } else {
        fail(ErrorCode::kFormat, where + ": unknown record type '" + type + "'");
      }
    } catch (const json::exception& e) {
      fail(ErrorCode::kFormat, where + ": " + e.what());
    }
  }
  return ds;
}

// ---- checkpoint ----

std::string render_checkpoint(const Checkpoint& c) {
  json vocab = json::array();
  for (const CategoryInfo& b : c.base_categories) vocab.push_back({{"kind", "base"}, {"index", b.id}});
  for (std::size_t i = 0; i < c.params.contexts.size(); ++i) {
    vocab.push_back({{"kind", "underlying"}, {"index", i}});
  }
  vocab.push_back({{"kind", "sub_background"}, {"index", 0}});
  json j{{"format", "lbp-checkpoint"},
         {"version", Checkpoint::kFormatVersion},
         {"config", c.config},
         {"config_hash", hex64(config_hash(c.config))},
         {"encoder", c.encoder},
         {"base_categories", c.base_categories},
         {"n_estimated", c.n_estimated},
         {"n_expansion", c.n_expansion},
         {"vocabulary", vocab},
         {"contexts", c.params.contexts},
         {"sub_background", c.params.sub_background.values},
         {"centers", c.centers},
         {"rng_state", c.rng_state},
         {"dataset_hash", hex64(c.dataset_hash)},
         {"steps_completed", c.steps_completed},
         {"bcp_branches", c.bcp_branches},
         {"rlx_branches", c.rlx_branches},
         {"initial_loss", c.initial_loss},
         {"final_loss", c.final_loss}};
  return j.dump(1) + "\n";
}

Checkpoint parse_checkpoint(const std::string& text) {
  const json j = parse_json(text, "checkpoint");
  check_header(j, "lbp-checkpoint", Checkpoint::kFormatVersion);
  Checkpoint c;
  try {
    c.config = j.at("config").get<TrainConfig>();
    c.encoder = j.at("encoder").get<EncoderConfig>();
    c.base_categories = j.at("base_categories").get<std::vector<CategoryInfo>>();
    c.n_estimated = j.at("n_estimated").get<std::size_t>();
    c.n_expansion = j.at("n_expansion").get<std::size_t>();
    c.params.contexts = j.at("contexts").get<std::vector<ContextVector>>();
    c.params.sub_background.values = j.at("sub_background").get<std::vector<double>>();
    c.centers = j.at("centers").get<std::vector<Embedding>>();
    c.rng_state = j.at("rng_state").get<std::string>();
    c.steps_completed = j.at("steps_completed").get<std::size_t>();
    c.bcp_branches = j.at("bcp_branches").get<std::size_t>();
    c.rlx_branches = j.at("rlx_branches").get<std::size_t>();
    c.initial_loss = j.at("initial_loss").get<double>();
    c.final_loss = j.at("final_loss").get<double>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, std::string("checkpoint: ") + e.what());
  }
  c.dataset_hash = parse_hex64(j.at("dataset_hash"), "dataset_hash");
  require(c.params.contexts.size() == c.n_estimated + c.n_expansion, ErrorCode::kFormat,
          "checkpoint: context count does not match n_estimated + n_expansion");
  return c;
}

std::string render_history(const TrainHistory& history) {
  std::string out;
  for (std::size_t i = 0; i < history.steps.size(); ++i) {
    const StepRecord& s = history.steps[i];
    out += json{{"step", i + 1},
                {"l_cls", s.loss.l_cls},
                {"l_bcp_prime", s.loss.l_bcp_prime},
                {"l_bod", s.loss.l_bod},
                {"l_final", s.loss.l_final},
                {"bcp_branches", s.bcp_branches},
                {"rlx_branches", s.rlx_branches},
                {"positives", s.positives},
                {"negatives", s.negatives}}
               .dump() +
           "\n";
  }
  return out;
}

// ---- reports ----

std::string render_eval_report(const EvalReport& report) {
  json j{{"format", "lbp-eval-report"}, {"version", kReportVersion}, {"report", report}};
  return j.dump(1) + "\n";
}

EvalReport parse_eval_report(const std::string& text) {
  const json j = parse_json(text, "eval report");
  check_header(j, "lbp-eval-report", kReportVersion);
  return get_as<EvalReport>(j.at("report"), "eval report");
}

std::string format_eval_report(const EvalReport& r) {
  std::ostringstream os;
  os << "novel top-1      " << fixed(r.novel_top1, 4) << "  (" << r.novel_instances << " proposals)\n"
     << "base top-1       " << fixed(r.base_top1, 4) << "  (" << r.base_instances << " proposals)\n"
     << "novel recall@" << fixed(r.recall_threshold, 2) << " " << fixed(r.novel_recall, 4) << "\n"
     << "rectified        " << (r.rectified ? "yes" : "no") << "\n"
     << "mean shrinking   " << fixed(r.mean_shrinking_factor, 4) << "\n"
     << "branches         bcp " << r.bcp_branches << "  rlx " << r.rlx_branches << "\n"
     << "confusion (rows: true id; columns:";
  for (int c : r.columns) os << ' ' << c;
  os << " bg)\n";
  for (const ConfusionRow& row : r.confusion) {
    os << std::setw(4) << row.label << " |";
    for (std::size_t n : row.counts) os << std::setw(5) << n;
    os << "\n";
  }
  return os.str();
}

std::string render_count_estimate(const DiscoveryResult& d) {
  json j{{"format", "lbp-count-estimate"},
         {"version", kReportVersion},
         {"k", d.n_estimated},
         {"estimated", d.estimated},
         {"low_confidence", d.estimate.low_confidence},
         {"candidates", d.estimate.candidates},
         {"silhouettes", d.estimate.silhouettes},
         {"filtered_proposals", d.filtered_proposals},
         {"centers", d.centers}};
  return j.dump(1) + "\n";
}

std::string format_count_estimate(const DiscoveryResult& d) {
  std::ostringstream os;
  os << "filtered background proposals: " << d.filtered_proposals << "\n";
  for (std::size_t i = 0; i < d.estimate.candidates.size(); ++i) {
    os << "  k=" << std::setw(2) << d.estimate.candidates[i] << "  silhouette "
       << fixed(d.estimate.silhouettes[i], 4) << (d.estimate.candidates[i] == d.n_estimated ? "  <-" : "")
       << "\n";
  }
  os << "n_o = " << d.n_estimated << (d.estimate.low_confidence ? " (low confidence)" : "") << "\n";
  return os.str();
}

std::string render_rectify_report(const RectifyReport& r) {
  json props = json::array();
  for (const auto& p : r.proposals) {
    props.push_back({{"proposal", p.proposal}, {"unrectified", p.unrectified}, {"rectified", p.rectified}});
  }
  json j{{"format", "lbp-rectify-report"}, {"version", kReportVersion}, {"tau", r.tau},
         {"columns", r.columns},           {"factors", r.factors},        {"proposals", props}};
  return j.dump(1) + "\n";
}

std::string format_rectify_report(const RectifyReport& r) {
  std::ostringstream os;
  os << "shrinking factors (tau " << r.tau << ")\n";
  for (std::size_t i = 0; i < r.factors.size(); ++i) {
    os << "  underlying " << std::setw(2) << i << "  " << fixed(r.factors[i], 6) << "\n";
  }
  os << "per-proposal max probability (unrectified -> rectified)\n";
  for (const auto& p : r.proposals) {
    const std::size_t best = argmax(p.rectified);
    os << "  proposal " << std::setw(5) << p.proposal << "  class " << std::setw(3) << r.columns[best]
       << "  " << fixed(p.unrectified[best], 6) << " -> " << fixed(p.rectified[best], 6) << "\n";
  }
  return os.str();
}

std::string render_ablation(const AblationTable& t) {
  json j{{"format", "lbp-ablation"}, {"version", kReportVersion}, {"rows", t.rows}};
  return j.dump(1) + "\n";
}

AblationTable parse_ablation(const std::string& text) {
  const json j = parse_json(text, "ablation table");
  check_header(j, "lbp-ablation", kReportVersion);
  AblationTable t;
  t.rows = get_as<std::vector<AblationRow>>(j.at("rows"), "ablation rows");
  return t;
}

std::string format_ablation(const AblationTable& t) {
  std::ostringstream os;
  os << "combination  seed  n_o  loss(1)   loss(T)   novel   base    recall\n";
  for (const AblationRow& r : t.rows) {
    os << std::left << std::setw(11) << to_string(r.combination) << std::right << std::setw(6) << r.seed
       << std::setw(5) << r.n_estimated << "  " << fixed(r.initial_loss, 4) << "  "
       << fixed(r.final_loss, 4) << "  " << fixed(r.report.novel_top1, 4) << "  "
       << fixed(r.report.base_top1, 4) << "  " << fixed(r.report.novel_recall, 4) << "\n";
  }
  std::vector<Combination> seen;
  for (const AblationRow& r : t.rows) {
    if (std::find(seen.begin(), seen.end(), r.combination) == seen.end()) seen.push_back(r.combination);
  }
  os << "median novel top-1:";
  for (Combination c : seen) os << "  " << to_string(c) << " " << fixed(median(t.novel_top1(c)), 4);
  os << "\n";
  return os.str();
}

std::string render_gradcheck(const GradcheckTable& t) {
  json rows = json::array();
  for (const GradcheckRow& r : t.rows) {
    rows.push_back({{"objective", to_string(r.objective)},
                    {"tau", r.tau},
                    {"instance", r.instance},
                    {"relative_error", r.relative_error},
                    {"tolerance", r.tolerance},
                    {"straddle", r.straddle},
                    {"pass", r.pass}});
  }
  json j{{"format", "lbp-gradcheck"}, {"version", kReportVersion}, {"all_pass", t.all_pass()},
         {"rows", rows}};
  return j.dump(1) + "\n";
}

std::string format_gradcheck(const GradcheckTable& t) {
  struct Agg {
    double worst = 0.0;
    double tol = 0.0;
    std::size_t n = 0, straddle = 0, failed = 0;
  };
  std::vector<std::pair<std::string, Agg>> groups;
  for (const GradcheckRow& r : t.rows) {
    const std::string key = std::string(to_string(r.objective)) + " tau=" + fixed(r.tau, 2);
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == key; });
    if (it == groups.end()) {
      groups.push_back({key, {}});
      it = groups.end() - 1;
    }
    Agg& a = it->second;
    ++a.n;
    a.tol = r.tolerance;
    if (r.straddle) {
      ++a.straddle;
    } else {
      a.worst = std::max(a.worst, r.relative_error);
    }
    if (!r.pass) ++a.failed;
  }
  std::ostringstream os;
  os << "objective        tau     n  straddle  max rel err  tolerance  status\n";
  for (const auto& [key, a] : groups) {
    std::ostringstream err;
    err << std::scientific << std::setprecision(2) << a.worst;
    std::ostringstream tol;
    tol << std::scientific << std::setprecision(0) << a.tol;
    os << std::left << std::setw(23) << key << std::right << std::setw(4) << a.n << std::setw(10)
       << a.straddle << std::setw(13) << err.str() << std::setw(11) << tol.str() << "  "
       << (a.failed ? "FAIL" : "ok") << "\n";
  }
  return os.str();
}

// ---- files ----

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot open '" + path + "' for writing");
  out << content;
  require(static_cast<bool>(out), ErrorCode::kIo, "write to '" + path + "' failed");
}

void write_report_dir(const std::string& dir, const std::vector<Artifact>& artifacts,
                      const std::string& command, std::uint64_t hash) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, ErrorCode::kIo, "cannot create directory '" + dir + "'");
  json files = json::array();
  for (const Artifact& a : artifacts) {
    write_file((std::filesystem::path(dir) / a.name).string(), a.content);
    files.push_back({{"name", a.name}, {"bytes", a.content.size()}, {"hash", hex64(fnv1a64(a.content))}});
  }
  json manifest{{"format", "lbp-manifest"},
                {"version", kReportVersion},
                {"command", command},
                {"config_hash", hex64(hash)},
                {"artifacts", files}};
  write_file((std::filesystem::path(dir) / "manifest.json").string(), manifest.dump(1) + "\n");
}

}  // namespace lbp
