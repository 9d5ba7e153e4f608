//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#include "mhnpath/pricing/pricing.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "mhnpath/chem/smiles.hpp"
#include "mhnpath/errors.hpp"
#include "mhnpath/util/text.hpp"

namespace mhnpath::pricing {

namespace {

void check_price(double p) {
  if (!(p >= 0) || !std::isfinite(p)) throw DomainError("price must be finite and >= 0");
}

std::string canonical(std::string_view smiles) {
  return chem::write_canonical_smiles(chem::parse_smiles(smiles));
}

}  // namespace

PriceCatalog PriceCatalog::load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open price catalog " + path.string());
  std::string line;
  if (!std::getline(in, line) || util::trim(line) != "canonical_smiles,usd_per_g,source,retrieved_at")
    throw SyntaxError(path.string() + ":1: header must be canonical_smiles,usd_per_g,source,retrieved_at");
  PriceCatalog catalog;
  std::string errors;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (util::trim(line).empty()) continue;
    try {
      const auto f = util::split(util::trim(line), ',');
      if (f.size() != 4) throw SyntaxError("expected 4 fields");
      const auto price = util::parse_number<double>(f[1]);
      if (!price) throw SyntaxError("bad price '" + f[1] + "'");
      if (f[2].empty()) throw SyntaxError("empty source");
      catalog.set(canonical(f[0]), {f[2], *price, f[3]});
    } catch (const Error &e) {
      errors += path.string() + ":" + std::to_string(line_no) + ": " + e.what() + "\n";
    }
  }
  if (!errors.empty()) throw SyntaxError(errors);
  return catalog;
}

void PriceCatalog::save(const std::filesystem::path &path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(17);
  out << "canonical_smiles,usd_per_g,source,retrieved_at\n";
  for (const auto &[key, list] : entries_)
    for (const CatalogEntry &e : list)
      out << key << ',' << e.usd_per_g << ',' << e.source << ',' << e.retrieved_at << '\n';
}

void PriceCatalog::set(const std::string &canonical_smiles, CatalogEntry entry) {
  check_price(entry.usd_per_g);
  auto &list = entries_[canonical_smiles];
  const auto it = std::find_if(list.begin(), list.end(),
                               [&](const CatalogEntry &e) { return e.source == entry.source; });
  if (it != list.end()) *it = std::move(entry);
  else list.push_back(std::move(entry));
}

void PriceCatalog::set(const chem::Molecule &m, CatalogEntry entry) {
  set(chem::write_canonical_smiles(m.without_maps()), std::move(entry));
}

const std::vector<CatalogEntry> *PriceCatalog::entries(const std::string &canonical_smiles) const {
  const auto it = entries_.find(canonical_smiles);
  return it == entries_.end() ? nullptr : &it->second;
}

std::optional<double> PriceCatalog::lookup(const std::string &canonical_smiles) const {
  const auto *list = entries(canonical_smiles);
  if (!list || list->empty()) return std::nullopt;
  double best = list->front().usd_per_g;
  for (const CatalogEntry &e : *list) best = std::min(best, e.usd_per_g);
  return best;
}

std::optional<double> lookup_price(const PriceCatalog &catalog, const chem::Molecule &m) {
  return catalog.lookup(chem::write_canonical_smiles(m.without_maps()));
}

void BuyabilityPolicy::validate() const {
  if (!(buyable_threshold > 0) || !(buyable_threshold <= nonbuyable_cap) ||
      !std::isfinite(nonbuyable_cap))
    throw ConfigError("buyability policy needs 0 < buyable_threshold <= nonbuyable_cap");
}

bool is_buyable(std::optional<double> price, const BuyabilityPolicy &policy) {
  return price && *price < policy.buyable_threshold;
}

double effective_cost(std::optional<double> price, const BuyabilityPolicy &policy) {
  return price ? std::min(*price, policy.nonbuyable_cap) : policy.nonbuyable_cap;
}

VendorConfig vendor_config_from_env(std::string endpoint) {
  VendorConfig cfg;
  cfg.endpoint = std::move(endpoint);
  if (const char *key = std::getenv("MHNPATH_VENDOR_KEY")) cfg.api_key = key;
  return cfg;
}

VendorClient::VendorClient(VendorConfig cfg) : cfg_(std::move(cfg)) {
  const auto scheme = cfg_.endpoint.find("://");
  if (scheme == std::string::npos || cfg_.endpoint.substr(0, scheme) != "http")
    throw ConfigError("vendor endpoint must be an http:// URL, got '" + cfg_.endpoint + "'");
  const auto path = cfg_.endpoint.find('/', scheme + 3);
  origin_ = cfg_.endpoint.substr(0, path);
  base_path_ = path == std::string::npos ? "" : cfg_.endpoint.substr(path);
  while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
}

std::vector<Quote> VendorClient::fetch_quotes(const chem::Molecule &m) const {
  httplib::Client cli(origin_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(cfg_.timeout - secs);
  cli.set_connection_timeout(secs.count(), usecs.count());
  cli.set_read_timeout(secs.count(), usecs.count());
  cli.set_write_timeout(secs.count(), usecs.count());
  const httplib::Params params{{"smiles", chem::write_canonical_smiles(m.without_maps())}};
  const httplib::Headers headers{{"X-Api-Key", cfg_.api_key}};

  for (int attempt = 0;; ++attempt) {
    const auto res = cli.Get(base_path_ + "/price", params, headers);
    if (!res) throw Timeout("vendor " + origin_ + " unreachable: " + httplib::to_string(res.error()));
    if (res->status == 401) throw AuthError("vendor rejected the API key (401)");
    if (res->status == 429) {
      if (attempt >= cfg_.max_retries) throw RateLimited("vendor rate limit (429) persisted after retries");
      long wait = 1;
      if (res->has_header("Retry-After"))
        wait = util::parse_number<long>(res->get_header_value("Retry-After")).value_or(1);
      wait = std::clamp<long>(wait, 0, static_cast<long>(cfg_.max_retry_wait.count()));
      std::this_thread::sleep_for(std::chrono::seconds(wait));
      continue;
    }
    if (res->status != 200) throw VendorError("vendor returned HTTP " + std::to_string(res->status));
    std::vector<Quote> out;
    try {
      const auto j = nlohmann::json::parse(res->body);
      for (const auto &q : j.at("quotes")) {
        Quote quote{q.at("source").get<std::string>(), q.at("usd_per_g").get<double>()};
        check_price(quote.usd_per_g);
        out.push_back(std::move(quote));
      }
    } catch (const nlohmann::json::exception &e) {
      throw VendorError(std::string("malformed vendor response: ") + e.what());
    } catch (const DomainError &e) {
      throw VendorError(std::string("bad vendor quote: ") + e.what());
    }
    return out;
  }
}

std::vector<Quote> fetch_quotes(const VendorClient &client, const chem::Molecule &m) {
  return client.fetch_quotes(m);
}

std::optional<double> price_with_quotes(PriceCatalog &catalog, const VendorClient *client,
                                        const chem::Molecule &m, bool merge) {
  const std::string key = chem::write_canonical_smiles(m.without_maps());
  std::optional<double> best = catalog.lookup(key);
  if (!client) return best;
  try {
    const std::string stamp = utc_timestamp();
    for (const Quote &q : client->fetch_quotes(m)) {
      best = best ? std::min(*best, q.usd_per_g) : q.usd_per_g;
      if (merge) catalog.set(key, {q.source, q.usd_per_g, stamp});
    }
  } catch (const VendorError &e) {
    std::cerr << "warning: vendor quote for " << key << " unavailable, using catalog: " << e.what()
              << '\n';
  }
  return best;
}

SyncReport sync_catalog(PriceCatalog &catalog, const VendorClient &client,
                        const std::vector<chem::Molecule> &molecules, int parallelism) {
  SyncReport report;
  std::mutex mutex;
  std::atomic<std::size_t> next{0};
  std::exception_ptr auth_failure;
  const std::string stamp = utc_timestamp();
  const auto worker = [&] {
    for (std::size_t i; (i = next++) < molecules.size();) {
      try {
        const auto quotes = client.fetch_quotes(molecules[i]);
        const std::lock_guard lock(mutex);
        for (const Quote &q : quotes) catalog.set(molecules[i], {q.source, q.usd_per_g, stamp});
        ++report.updated;
      } catch (const AuthError &) {
        const std::lock_guard lock(mutex);
        if (!auth_failure) auth_failure = std::current_exception();
        next = molecules.size();
      } catch (const VendorError &e) {
        const std::lock_guard lock(mutex);
        std::cerr << "warning: " << chem::write_canonical_smiles(molecules[i]) << ": " << e.what() << '\n';
        ++report.failed;
      }
    }
  };
  std::vector<std::thread> threads;
  for (int t = 0; t < std::max(1, parallelism); ++t) threads.emplace_back(worker);
  for (std::thread &t : threads) t.join();
  if (auth_failure) std::rethrow_exception(auth_failure);
  return report;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace mhnpath::pricing
