//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#include "cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mhnpath/chem/smiles.hpp"
#include "mhnpath/errors.hpp"
#include "mhnpath/evalharness/evalharness.hpp"
#include "mhnpath/mhn/train.hpp"
#include "mhnpath/templates/extract.hpp"

namespace mhnpath::cli {

namespace fs = std::filesystem;

namespace {

template <typename T>
T get_as(const nlohmann::json &v, const std::string &key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception &) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

void apply_search_json(RunConfig &cfg, const nlohmann::json &j) {
  if (!j.is_object()) throw ConfigError("config key 'search' must be an object");
  for (const auto &[key, v] : j.items()) {
    const std::string k = "search." + key;
    auto &s = cfg.search;
    if (key == "max_depth") s.max_depth = get_as<int>(v, k);
    else if (key == "time_limit_s") s.time_limit_s = get_as<double>(v, k);
    else if (key == "max_expansions") s.max_expansions = get_as<int>(v, k);
    else if (key == "top_n_templates") s.top_n_templates = get_as<int>(v, k);
    else if (key == "route_limit") s.route_limit = get_as<int>(v, k);
    else if (key == "max_matches") s.max_matches = get_as<int>(v, k);
    else if (key == "accept_cost") s.accept_cost = v.is_null() ? std::nullopt : std::optional(get_as<double>(v, k));
    else if (key == "buyable_threshold") s.policy.buyable_threshold = get_as<double>(v, k);
    else if (key == "w_cost") s.weights.w_cost = get_as<double>(v, k);
    else if (key == "w_temp") s.weights.w_temp = get_as<double>(v, k);
    else if (key == "w_solv") s.weights.w_solv = get_as<double>(v, k);
    else if (key == "kelvin") cfg.kelvin = get_as<bool>(v, k);
    else throw ConfigError("unknown config key '" + k + "'");
  }
}

PrioritizerPaths prioritizer_from_json(const nlohmann::json &j) {
  if (!j.is_object()) throw ConfigError("each prioritizer must be an object");
  PrioritizerPaths p;
  for (const auto &[key, v] : j.items()) {
    if (key == "templates") p.templates = get_as<std::string>(v, "prioritizers.templates");
    else if (key == "models") p.models = get_as<std::vector<std::string>>(v, "prioritizers.models");
    else throw ConfigError("unknown config key 'prioritizers." + key + "'");
  }
  return p;
}

class Log {
public:
  Log(std::ostream &err, const std::string &level) : err_(err), level_(level == "quiet" ? 0 : level == "debug" ? 2 : 1) {}
  void info(const std::string &msg) const {
    if (level_ >= 1) err_ << msg << '\n';
  }
  void debug(const std::string &msg) const {
    if (level_ >= 2) err_ << msg << '\n';
  }

private:
  std::ostream &err_;
  int level_;
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void require_file(const std::string &path, const std::string &what) {
  if (path.empty()) throw ConfigError("no " + what + " given");
  if (!fs::is_regular_file(path)) throw ConfigError(what + " not found: " + path);
}

std::string read_text(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw IoError("cannot write " + path.string());
}

/// Records the command and seed of a run next to its outputs.
void write_manifest(const RunConfig &cfg, const std::string &command) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["seed"] = cfg.seed;
  j["prioritizers"] = nlohmann::ordered_json::array();
  for (const auto &p : cfg.prioritizers) j["prioritizers"].push_back({{"templates", p.templates}, {"models", p.models}});
  write_text(fs::path(cfg.output_dir) / "run.json", j.dump(2) + "\n");
}

struct Loaded {
  std::vector<std::unique_ptr<templates::TemplateLibrary>> libraries;
  std::vector<std::unique_ptr<mhn::Ensemble>> ensembles;

  std::vector<search::Prioritizer> prioritizers() const {
    std::vector<search::Prioritizer> out;
    for (std::size_t i = 0; i < ensembles.size(); ++i) out.push_back({ensembles[i].get(), libraries[i].get()});
    return out;
  }
};

Loaded load_prioritizers(const RunConfig &cfg, const Log &log) {
  if (cfg.prioritizers.empty()) throw ConfigError("no prioritizer given (--templates and --model)");
  Loaded loaded;
  for (const auto &p : cfg.prioritizers) {
    require_file(p.templates, "template library");
    if (p.models.empty()) throw ConfigError("prioritizer for " + p.templates + " has no model");
    auto lib = std::make_unique<templates::TemplateLibrary>(templates::TemplateLibrary::load(p.templates));
    std::vector<mhn::PrioritizerModel> models;
    for (const auto &m : p.models) {
      require_file(m, "model file");
      models.push_back(mhn::load_model(m, *lib));
    }
    log.debug("loaded " + std::to_string(models.size()) + " model(s) over " + std::to_string(lib->size()) +
              " templates from " + p.templates);
    loaded.ensembles.push_back(std::make_unique<mhn::Ensemble>(std::move(models), *lib));
    loaded.libraries.push_back(std::move(lib));
  }
  return loaded;
}

void add_common(CLI::App *sub, Flags &f) {
  sub->add_option("--config", f.config, "JSON config file (default: $MHNPATH_CONFIG)");
  sub->add_option("--out-dir", f.output_dir, "Directory for output files");
  sub->add_option("--seed", f.seed, "Seed for every random choice");
  sub->add_option("--log-level", f.log_level, "Progress output on stderr")
      ->check(CLI::IsMember({"quiet", "info", "debug"}));
}

void add_prioritizer(CLI::App *sub, Flags &f) {
  sub->add_option("--templates", f.templates, "Template library TSV");
  sub->add_option("--model", f.models, "Model file trained on the library (repeat for an ensemble)");
}

RunConfig resolve(const CLI::App &sub, const Flags &f) {
  RunConfig cfg;
  std::string config_path = f.config;
  if (sub.get_option("--config")->count() == 0) {
    const char *env = std::getenv("MHNPATH_CONFIG");
    config_path = env ? env : "";
  }
  if (!config_path.empty()) {
    require_file(config_path, "config file");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_text(config_path));
    } catch (const nlohmann::json::exception &e) {
      throw ConfigError(config_path + ": " + e.what());
    }
    apply_config_json(cfg, j);
  }
  const auto given = [&](const char *name) {
    const CLI::Option *opt = sub.get_option_no_throw(name);
    return opt && opt->count() > 0;
  };
  if (given("--out-dir")) cfg.output_dir = f.output_dir;
  if (given("--seed")) cfg.seed = f.seed;
  if (given("--log-level")) cfg.log_level = f.log_level;
  if (given("--templates") || given("--model")) {
    PrioritizerPaths p = cfg.prioritizers.empty() ? PrioritizerPaths{} : cfg.prioritizers.front();
    if (given("--templates")) p.templates = f.templates;
    if (given("--model")) p.models = f.models;
    cfg.prioritizers = {p};
  }
  if (given("--catalog")) cfg.catalog = f.catalog;
  if (given("--toxicity")) cfg.toxicity = f.toxicity;
  if (given("--conditions")) cfg.conditions = f.conditions;
  auto &s = cfg.search;
  if (given("--w-cost")) s.weights.w_cost = f.w_cost;
  if (given("--w-temp")) s.weights.w_temp = f.w_temp;
  if (given("--w-solv")) s.weights.w_solv = f.w_solv;
  if (given("--time-limit")) s.time_limit_s = f.time_limit;
  if (given("--max-depth")) s.max_depth = f.max_depth;
  if (given("--max-expansions")) s.max_expansions = f.max_expansions;
  if (given("--top-n")) s.top_n_templates = f.top_n;
  if (given("--route-limit")) s.route_limit = f.route_limit;
  if (given("--kelvin")) cfg.kelvin = f.kelvin;
  fs::create_directories(cfg.output_dir);
  return cfg;
}

chem::Molecule parse_target(const std::string &smiles) {
  try {
    return chem::parse_smiles(smiles);
  } catch (const SyntaxError &e) {
    throw SyntaxError("cannot parse SMILES '" + smiles + "': " + e.what());
  }
}

int cmd_train(const CLI::App &sub, const Flags &f, std::ostream &out, std::ostream &err) {
  const RunConfig cfg = resolve(sub, f);
  const Log log(err, cfg.log_level);
  require_file(f.dataset, "dataset");
  if (cfg.prioritizers.empty()) throw ConfigError("no template library given (--templates)");
  require_file(cfg.prioritizers.front().templates, "template library");
  mhn::ModelConfig mc = mhn::config_from_json(cfg.model);
  mc.seed = cfg.seed;
  if (sub.count("--epochs")) mc.epochs = f.epochs;
  if (mc.epochs < 1) throw ConfigError("epochs must be >= 1");
  mc.validate();

  const auto lib = templates::TemplateLibrary::load(cfg.prioritizers.front().templates);
  const auto rows = mhn::read_dataset(f.dataset);
  for (const auto &r : rows)
    if (r.template_id < 0 || r.template_id >= lib.size())
      throw IdOutOfRange("dataset template id " + std::to_string(r.template_id) + " not in library");
  const auto split = mhn::split_dataset(mhn::featurize(rows, mc.fp_radius, mc.fp_bits), mc.seed);
  log.info("train " + std::to_string(split.train.size()) + ", val " + std::to_string(split.val.size()) +
           ", test " + std::to_string(split.test.size()));
  auto model = mhn::init_model(mc, lib);
  const auto history = mhn::train(model, split, mc, [&](const mhn::EpochStats &s) {
    log.info("epoch " + std::to_string(s.epoch) + " train_loss " + fixed(s.train_loss, 4) + " val_top1 " +
             fixed(s.val_top1, 4));
  });
  const fs::path model_path = f.model_out.empty() ? fs::path(cfg.output_dir) / "model.mhnp" : fs::path(f.model_out);
  mhn::save_model(model, model_path);
  mhn::write_history(history, fs::path(cfg.output_dir) / "history.csv");
  write_manifest(cfg, "train");
  const auto &last = history.back();
  out << "model " << model_path.string() << "\nval_top1 " << fixed(last.val_top1, 4) << "\nval_top100 "
      << fixed(last.val_top100, 4) << '\n';
  return kExitOk;
}

int cmd_rank(const CLI::App &sub, const Flags &f, std::ostream &out, std::ostream &err) {
  const RunConfig cfg = resolve(sub, f);
  const Log log(err, cfg.log_level);
  if (f.n < 1) throw ConfigError("--n must be >= 1");
  const chem::Molecule target = parse_target(f.smiles);
  const Loaded loaded = load_prioritizers(cfg, log);
  out << "prioritizer\trank\ttemplate_id\tscore\tapplicable\n";
  for (std::size_t p = 0; p < loaded.ensembles.size(); ++p) {
    const auto ranked = mhn::rank_templates(*loaded.ensembles[p], target, f.n, f.screen);
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      const bool applies =
          !templates::apply_template(loaded.libraries[p]->at(ranked[i].template_id), target).empty();
      char score[32];
      std::snprintf(score, sizeof score, "%.6g", ranked[i].score);
      out << p << '\t' << i + 1 << '\t' << ranked[i].template_id << '\t' << score << '\t'
          << (applies ? "yes" : "no") << '\n';
    }
  }
  return kExitOk;
}

int cmd_search(const CLI::App &sub, const Flags &f, std::ostream &out, std::ostream &err,
               const std::atomic<bool> *cancel) {
  RunConfig cfg = resolve(sub, f);
  const Log log(err, cfg.log_level);
  cfg.search.validate();
  const chem::Molecule target = parse_target(f.smiles);
  const Loaded loaded = load_prioritizers(cfg, log);
  pricing::PriceCatalog catalog;
  if (!cfg.catalog.empty()) {
    require_file(cfg.catalog, "catalog");
    catalog = pricing::PriceCatalog::load(cfg.catalog);
  }
  scoring::ToxicityDB toxicity;
  if (!cfg.toxicity.empty()) {
    require_file(cfg.toxicity, "toxicity table");
    toxicity = scoring::ToxicityDB::load(cfg.toxicity);
  }
  std::unique_ptr<conditions::ConditionPredictor> predictor;
  if (!cfg.conditions.empty()) {
    require_file(cfg.conditions, "conditions table");
    predictor = std::make_unique<conditions::TablePredictor>(conditions::TablePredictor::load(cfg.conditions));
  } else if (!cfg.condition_command.empty()) {
    predictor = std::make_unique<conditions::ProcessPredictor>(cfg.condition_command);
  }

  const search::Services services{&catalog, predictor.get(), &toxicity};
  const auto result = search::run_search(target, loaded.prioritizers(), cfg.search, services, cancel);
  const auto routes = search::extract_routes(*result.root, cfg.search.weights, cfg.search.policy);

  const fs::path dir = cfg.output_dir;
  const search::TreeStyle style{cfg.kelvin ? search::TemperatureUnit::kKelvin : search::TemperatureUnit::kCelsius};
  write_text(dir / "tree.json", search::serialize_tree(*result.root, style));
  write_text(dir / "tree.dot", search::to_dot(*result.root));
  search::write_expansion_log(result.log, dir / "expansions.csv");
  std::string csv = "rank,score,length,total_cost,max_temperature_c,min_solvent_score,leaf,steps\n";
  for (std::size_t i = 0; i < routes.size(); ++i) {
    const auto &r = routes[i];
    std::string steps;
    for (const auto *e : r.edges) steps += (steps.empty() ? "" : " | ") + e->reaction_smiles;
    csv += std::to_string(i + 1) + "," + fixed(r.score, 6) + "," + std::to_string(r.length) + "," +
           fixed(r.total_cost, 4) + "," + fixed(r.max_temperature_c, 2) + "," + fixed(r.min_solvent_score, 4) +
           "," + r.leaf->key() + "," + steps + "\n";
  }
  write_text(dir / "routes.csv", csv);
  write_manifest(cfg, "search");

  out << "stop " << result.stop_reason << "\nexpansions " << result.expansions << "\nroutes " << routes.size()
      << '\n';
  for (std::size_t i = 0; i < routes.size() && i < 5; ++i)
    out << "  #" << i + 1 << " score " << fixed(routes[i].score, 4) << " steps " << routes[i].length << " cost $"
        << fixed(routes[i].total_cost, 2) << "/g\n";
  return kExitOk;
}

int cmd_eval(const CLI::App &sub, const Flags &f, std::ostream &out, std::ostream &err) {
  const RunConfig cfg = resolve(sub, f);
  const Log log(err, cfg.log_level);
  require_file(f.cases, "cases file");
  const Loaded loaded = load_prioritizers(cfg, log);
  if (loaded.ensembles.size() > 1) log.info("evaluating the first prioritizer only");
  const auto &lib = *loaded.libraries.front();
  const auto cases = eval::load_cases(f.cases, lib);
  const auto report = eval::evaluate(cases, *loaded.ensembles.front(), lib,
                                     {std::begin(eval::kCutoffs), std::end(eval::kCutoffs)}, f.threads);
  const std::string table = eval::format_report_table(report);
  eval::write_report_csv(report, fs::path(cfg.output_dir) / "metrics.csv");
  write_text(fs::path(cfg.output_dir) / "metrics.txt", table);
  write_manifest(cfg, "eval");
  out << table;
  return kExitOk;
}

int cmd_extract(const CLI::App &sub, const Flags &f, std::ostream &out, std::ostream &err) {
  const RunConfig cfg = resolve(sub, f);
  const Log log(err, cfg.log_level);
  require_file(f.reactions, "reactions file");
  if (f.radius < 0) throw ConfigError("--radius must be >= 0");
  const auto report = templates::extract_library(templates::read_reactions(f.reactions), f.radius);
  for (const auto &failure : report.failures) log.info("skipped " + failure);
  const fs::path path = f.library_out.empty() ? fs::path(cfg.output_dir) / "templates.tsv" : fs::path(f.library_out);
  report.library.save(path);
  write_manifest(cfg, "extract");
  out << "templates " << report.library.size() << "\nfailed " << report.failures.size() << "\nlibrary "
      << path.string() << '\n';
  return kExitOk;
}

int cmd_price_sync(const CLI::App &sub, const Flags &f, std::ostream &out, std::ostream &err) {
  const RunConfig cfg = resolve(sub, f);
  const Log log(err, cfg.log_level);
  require_file(f.molecules, "molecule list");
  if (cfg.catalog.empty()) throw ConfigError("no catalog given (--catalog)");
  auto vendor = pricing::vendor_config_from_env(f.endpoint);
  if (vendor.api_key.empty()) throw ConfigError("MHNPATH_VENDOR_KEY is not set");
  pricing::PriceCatalog catalog;
  if (fs::exists(cfg.catalog)) catalog = pricing::PriceCatalog::load(cfg.catalog);
  std::vector<chem::Molecule> molecules;
  std::istringstream lines(read_text(f.molecules));
  for (std::string line; std::getline(lines, line);)
    if (!line.empty() && line[0] != '#') molecules.push_back(parse_target(line));
  const pricing::VendorClient client(vendor);
  const auto report = pricing::sync_catalog(catalog, client, molecules);
  catalog.save(cfg.catalog);
  out << "updated " << report.updated << "\nfailed " << report.failed << '\n';
  return report.failed == 0 ? kExitOk : kExitFailure;
}

/// Bad flags, config values or input files, as opposed to failures while
/// running.
bool usage_error(const Error &e) {
  return dynamic_cast<const ConfigError *>(&e) || dynamic_cast<const SyntaxError *>(&e) ||
         dynamic_cast<const IdOutOfRange *>(&e) || dynamic_cast<const ChecksumError *>(&e) ||
         dynamic_cast<const VersionError *>(&e) || dynamic_cast<const CorruptFile *>(&e) ||
         dynamic_cast<const LibraryLoadError *>(&e) || dynamic_cast<const FormatError *>(&e) ||
         dynamic_cast<const EmptyDataset *>(&e) || dynamic_cast<const EmptyCases *>(&e);
}

}  // namespace

void apply_config_json(RunConfig &cfg, const nlohmann::json &j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto &[key, v] : j.items()) {
    if (key == "seed") cfg.seed = get_as<std::uint64_t>(v, key);
    else if (key == "output_dir") cfg.output_dir = get_as<std::string>(v, key);
    else if (key == "log_level") {
      cfg.log_level = get_as<std::string>(v, key);
      if (cfg.log_level != "quiet" && cfg.log_level != "info" && cfg.log_level != "debug")
        throw ConfigError("log_level must be quiet, info or debug");
    } else if (key == "prioritizers") {
      if (!v.is_array()) throw ConfigError("config key 'prioritizers' must be an array");
      cfg.prioritizers.clear();
      for (const auto &p : v) cfg.prioritizers.push_back(prioritizer_from_json(p));
    } else if (key == "catalog") cfg.catalog = get_as<std::string>(v, key);
    else if (key == "toxicity") cfg.toxicity = get_as<std::string>(v, key);
    else if (key == "conditions") cfg.conditions = get_as<std::string>(v, key);
    else if (key == "condition_command") cfg.condition_command = get_as<std::vector<std::string>>(v, key);
    else if (key == "model") {
      mhn::config_from_json(v);  // rejects unknown keys early
      cfg.model = v;
    } else if (key == "search") apply_search_json(cfg, v);
    else throw ConfigError("unknown config key '" + key + "'");
  }
}

std::unique_ptr<CLI::App> make_app(Flags &f) {
  auto app = std::make_unique<CLI::App>("Retrosynthesis planning with Hopfield template prioritization.", "mhnpath");
  app->require_subcommand(1);

  auto *train = app->add_subcommand("train", "Train a template prioritizer");
  add_common(train, f);
  train->add_option("--dataset", f.dataset, "Training set TSV (product_smiles, template_id)")->required();
  train->add_option("--templates", f.templates, "Template library TSV");
  train->add_option("--model-out", f.model_out, "Model file to write (default: <out-dir>/model.mhnp)");
  train->add_option("--epochs", f.epochs, "Number of epochs (overrides the model config)");

  auto *rank = app->add_subcommand("rank", "Rank templates for one molecule");
  add_common(rank, f);
  add_prioritizer(rank, f);
  rank->add_option("--smiles", f.smiles, "Query molecule")->required();
  rank->add_option("--n", f.n, "Number of templates to list")->capture_default_str();
  rank->add_flag("--screen", f.screen, "Drop templates failing the substructure screen");

  auto *search = app->add_subcommand("search", "Plan routes for one target");
  add_common(search, f);
  add_prioritizer(search, f);
  search->add_option("--smiles", f.smiles, "Target molecule")->required();
  search->add_option("--catalog", f.catalog, "Price catalog CSV");
  search->add_option("--toxicity", f.toxicity, "Toxicity table CSV");
  search->add_option("--conditions", f.conditions, "Reaction conditions table CSV");
  search->add_option("--w-cost", f.w_cost, "Weight of the cost score")->capture_default_str();
  search->add_option("--w-temp", f.w_temp, "Weight of the temperature score")->capture_default_str();
  search->add_option("--w-solv", f.w_solv, "Weight of the solvent score")->capture_default_str();
  search->add_option("--time-limit", f.time_limit, "Wall-clock limit in seconds (0: none)")->capture_default_str();
  search->add_option("--max-depth", f.max_depth, "Maximum route length")->capture_default_str();
  search->add_option("--max-expansions", f.max_expansions, "Expansion budget (0: none)")->capture_default_str();
  search->add_option("--top-n", f.top_n, "Templates tried per expansion and prioritizer")->capture_default_str();
  search->add_option("--route-limit", f.route_limit, "Stop after this many solved nodes (0: none)")
      ->capture_default_str();
  search->add_flag("--kelvin", f.kelvin, "Write tree temperatures in Kelvin");

  auto *evaluate = app->add_subcommand("eval", "Template prioritization metrics");
  add_common(evaluate, f);
  add_prioritizer(evaluate, f);
  evaluate->add_option("--cases", f.cases, "Cases TSV (product_smiles, template_id)")->required();
  evaluate->add_option("--threads", f.threads, "Worker threads")->capture_default_str();

  auto *extract = app->add_subcommand("extract", "Extract a template library from mapped reactions");
  add_common(extract, f);
  extract->add_option("--reactions", f.reactions, "Mapped reactions TSV (reaction_smiles, source[, enzyme_id])")
      ->required();
  extract->add_option("--radius", f.radius, "Environment radius around changed atoms")->capture_default_str();
  extract->add_option("--out", f.library_out, "Library TSV to write (default: <out-dir>/templates.tsv)");

  auto *price = app->add_subcommand("price", "Vendor price tools");
  price->require_subcommand(1);
  auto *sync = price->add_subcommand("sync", "Refresh catalog prices from the vendor API");
  add_common(sync, f);
  sync->add_option("--catalog", f.catalog, "Catalog CSV to update (created when missing)");
  sync->add_option("--molecules", f.molecules, "File with one SMILES per line")->required();
  sync->add_option("--endpoint", f.endpoint, "Vendor base URL; the key comes from MHNPATH_VENDOR_KEY")->required();
  return app;
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err,
        const std::atomic<bool> *cancel) {
  Flags flags;
  auto app = make_app(flags);
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app->parse(reversed);
  } catch (const CLI::ParseError &e) {
    const int code = app->exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  try {
    const auto *sub = app->get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "train") return cmd_train(*sub, flags, out, err);
    if (name == "rank") return cmd_rank(*sub, flags, out, err);
    if (name == "search") return cmd_search(*sub, flags, out, err, cancel);
    if (name == "eval") return cmd_eval(*sub, flags, out, err);
    if (name == "extract") return cmd_extract(*sub, flags, out, err);
    return cmd_price_sync(*sub->get_subcommands().front(), flags, out, err);
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return usage_error(e) ? kExitUsage : kExitFailure;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace mhnpath::cli
