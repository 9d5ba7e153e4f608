//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "cli.hpp"
#include "httplib.h"
#include "mhnpath/chem/smiles.hpp"
#include "mhnpath/pricing/pricing.hpp"
#include "mhnpath/util/text.hpp"
#include "test_support.hpp"

namespace mhnpath {
namespace {

namespace fs = std::filesystem;

const fs::path kToy = testing::data_path("toy");
const std::string kAmide = "O=C(NCc1ccccc1)CCc1ccccc1";

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args, const std::atomic<bool> *cancel = nullptr) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err, cancel);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string &name) {
  const auto dir = fs::temp_directory_path() / "mhnpath_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string toy(const char *file) { return (kToy / file).string(); }

/// Trains the toy model into dir and returns its path.
std::string train_toy(const fs::path &dir) {
  const auto r = run({"train", "--config", toy("config.json"), "--dataset", toy("dataset.tsv"), "--templates",
                      toy("templates.tsv"), "--out-dir", dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  return (dir / "model.mhnp").string();
}

std::vector<std::string> toy_search(const std::string &model, const fs::path &dir, const std::string &smiles) {
  return {"search",      "--config",     toy("config.json"), "--smiles",   smiles,
          "--templates", toy("templates.tsv"), "--model",    model,        "--catalog",
          toy("catalog.csv"), "--conditions", toy("conditions.csv"), "--toxicity", toy("toxicity.csv"),
          "--out-dir",   dir.string()};
}

TEST(Cli, EveryOptionIsDocumented) {
  cli::Flags flags;
  const auto app = cli::make_app(flags);
  std::vector<const CLI::App *> commands;
  for (const CLI::App *sub : app->get_subcommands({})) {
    if (sub->get_subcommands({}).empty()) commands.push_back(sub);
    for (const CLI::App *inner : sub->get_subcommands({})) commands.push_back(inner);
  }
  ASSERT_EQ(commands.size(), 6u);
  for (const CLI::App *cmd : commands) {
    std::vector<std::string> args;
    if (cmd->get_parent() != app.get()) args.push_back(cmd->get_parent()->get_name());
    args.push_back(cmd->get_name());
    args.push_back("--help");
    const auto r = run(args);
    EXPECT_EQ(r.code, 0);
    for (const CLI::Option *opt : cmd->get_options()) {
      if (opt->get_name() == "--help") continue;
      EXPECT_FALSE(opt->get_description().empty()) << cmd->get_name() << " " << opt->get_name();
      EXPECT_NE(r.out.find(opt->get_name()), std::string::npos) << cmd->get_name() << " " << opt->get_name();
    }
  }
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"search", "--smiles", "C", "--bogus"}).code, 2);
}

TEST(Cli, Train) {
  const auto dir = scratch("train");
  const std::string model = train_toy(dir);
  EXPECT_TRUE(fs::exists(model));
  EXPECT_TRUE(fs::exists(dir / "history.csv"));
  EXPECT_NE(slurp(dir / "run.json").find("\"seed\": 7"), std::string::npos);

  auto r = run({"train", "--dataset", (dir / "missing.tsv").string(), "--templates", toy("templates.tsv"),
                "--out-dir", dir.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("missing.tsv"), std::string::npos);
  r = run({"train", "--config", toy("config.json"), "--dataset", toy("dataset.tsv"), "--templates",
           toy("templates.tsv"), "--out-dir", dir.string(), "--epochs", "0"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("epochs"), std::string::npos);
}

TEST(Cli, Rank) {
  const auto dir = scratch("rank");
  const std::string model = train_toy(dir);
  auto r = run({"rank", "--templates", toy("templates.tsv"), "--model", model, "--smiles", kAmide, "--n", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto table = [](const std::string &text) {
    // template id -> applicable
    std::map<std::string, std::string> rows;
    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line)) {
      const auto f = util::split(line, '\t');
      rows[f.at(2)] = f.at(4);
    }
    return rows;
  };
  const auto all = table(r.out);
  ASSERT_EQ(all.size(), 10u);

  r = run({"rank", "--templates", toy("templates.tsv"), "--model", model, "--smiles", kAmide, "--n", "10",
           "--screen"});
  ASSERT_EQ(r.code, 0);
  const auto screened = table(r.out);
  EXPECT_LT(screened.size(), all.size());
  for (const auto &[id, applicable] : all)
    if (!screened.count(id)) EXPECT_EQ(applicable, "no") << "screen removed applicable template " << id;
  EXPECT_EQ(std::count_if(all.begin(), all.end(), [](const auto &kv) { return kv.second == "yes"; }),
            std::count_if(screened.begin(), screened.end(), [](const auto &kv) { return kv.second == "yes"; }));

  r = run({"rank", "--templates", toy("templates.tsv"), "--model", model, "--smiles", "CC(C"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("position"), std::string::npos) << r.err;
}

TEST(Cli, SearchMatchesFrozenTree) {
  const auto dir = scratch("search");
  const std::string model = train_toy(dir);
  const auto r = run(toy_search(model, dir, kAmide));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir / "tree.json"), slurp(kToy / "tree.json"));
  EXPECT_NE(r.out.find("routes 1"), std::string::npos);
  for (const char *f : {"tree.dot", "routes.csv", "expansions.csv", "run.json"}) EXPECT_TRUE(fs::exists(dir / f)) << f;
}

TEST(Cli, SearchEdgeCases) {
  const auto dir = scratch("search_edges");
  const std::string model = train_toy(dir);
  auto args = toy_search(model, dir, "OC(=O)CCc1ccccc1");
  auto r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto tree = nlohmann::json::parse(slurp(dir / "tree.json"));
  EXPECT_TRUE(tree["subtrees"].empty());
  EXPECT_NE(r.out.find("expansions 0"), std::string::npos);

  args = toy_search(model, dir, kAmide);
  args.insert(args.end(), {"--time-limit", "0.001"});
  r = run(args);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NO_THROW(nlohmann::json::parse(slurp(dir / "tree.json")));

  const std::atomic<bool> cancel{true};
  r = run(toy_search(model, dir, kAmide), &cancel);
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("stop cancelled"), std::string::npos);
  EXPECT_TRUE(nlohmann::json::parse(slurp(dir / "tree.json"))["subtrees"].empty());
}

TEST(Cli, ConfigPrecedence) {
  const auto dir = scratch("config");
  const std::string model = train_toy(dir);
  {
    std::ofstream out(dir / "shallow.json");
    out << R"({"search": {"max_depth": 1}, "log_level": "quiet"})";
  }
  auto args = toy_search(model, dir, kAmide);
  args[2] = (dir / "shallow.json").string();
  EXPECT_NE(run(args).out.find("routes 0"), std::string::npos);
  args.insert(args.end(), {"--max-depth", "2"});
  EXPECT_NE(run(args).out.find("routes 1"), std::string::npos);

  // The environment supplies the file when --config is absent.
  ::setenv("MHNPATH_CONFIG", (dir / "shallow.json").string().c_str(), 1);
  auto no_config = toy_search(model, dir, kAmide);
  no_config.erase(no_config.begin() + 1, no_config.begin() + 3);
  const auto from_env = run(no_config);
  ::unsetenv("MHNPATH_CONFIG");
  EXPECT_NE(from_env.out.find("routes 0"), std::string::npos);
  EXPECT_NE(run(no_config).out.find("routes 1"), std::string::npos);

  {
    std::ofstream out(dir / "bad.json");
    out << R"({"search": {"depth": 1}})";
  }
  args[2] = (dir / "bad.json").string();
  const auto bad = run(args);
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("search.depth"), std::string::npos);
}

TEST(Cli, EvalAndExtract) {
  const auto dir = scratch("eval");
  const std::string model = train_toy(dir);
  auto r = run({"eval", "--templates", toy("templates.tsv"), "--model", model, "--cases", toy("dataset.tsv"),
                "--out-dir", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("T100"), std::string::npos);
  EXPECT_EQ(slurp(dir / "metrics.csv").rfind("n,lit_rule_acc", 0), 0u);

  r = run({"extract", "--reactions", toy("reactions.tsv"), "--out", (dir / "lib.tsv").string(), "--out-dir",
           dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir / "lib.tsv"), slurp(kToy / "templates.tsv"));
  EXPECT_EQ(run({"extract", "--reactions", toy("reactions.tsv"), "--radius", "-1"}).code, 2);
}

TEST(Cli, SeedFixesEveryOutput) {
  const auto a = scratch("det_a"), b = scratch("det_b");
  for (const auto &dir : {a, b}) {
    const std::string model = train_toy(dir);
    ASSERT_EQ(run(toy_search(model, dir, kAmide)).code, 0);
    ASSERT_EQ(run({"eval", "--templates", toy("templates.tsv"), "--model", model, "--cases", toy("dataset.tsv"),
                   "--out-dir", dir.string(), "--threads", "2"})
                  .code,
              0);
  }
  for (const char *f : {"model.mhnp", "history.csv", "tree.json", "tree.dot", "routes.csv", "metrics.csv"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(Cli, PriceSync) {
  httplib::Server server;
  server.Get("/v1/price", [](const httplib::Request &req, httplib::Response &res) {
    if (req.get_header_value("X-Api-Key") != "good") {
      res.status = 401;
      return;
    }
    res.set_content(R"({"quotes":[{"source":"mock","usd_per_g":2.5}]})", "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  const std::string endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1";

  const auto dir = scratch("price");
  {
    std::ofstream out(dir / "molecules.smi");
    out << "CCO\nc1ccccc1\n";
  }
  const std::vector<std::string> args{"price", "sync", "--catalog", (dir / "catalog.csv").string(), "--molecules",
                                      (dir / "molecules.smi").string(), "--endpoint", endpoint};
  ::unsetenv("MHNPATH_VENDOR_KEY");
  EXPECT_EQ(run(args).code, 2);
  ::setenv("MHNPATH_VENDOR_KEY", "bad", 1);
  EXPECT_EQ(run(args).code, 1);
  ::setenv("MHNPATH_VENDOR_KEY", "good", 1);
  const auto r = run(args);
  ::unsetenv("MHNPATH_VENDOR_KEY");
  server.stop();
  thread.join();
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("updated 2"), std::string::npos);
  const auto catalog = pricing::PriceCatalog::load(dir / "catalog.csv");
  EXPECT_EQ(catalog.lookup(chem::write_canonical_smiles(chem::parse_smiles("CCO"))), 2.5);
  EXPECT_EQ(catalog.size(), 2u);
}

}  // namespace
}  // namespace mhnpath
