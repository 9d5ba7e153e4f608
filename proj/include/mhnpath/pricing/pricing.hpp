//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MHNPATH_PRICING_PRICING_HPP
#define MHNPATH_PRICING_PRICING_HPP

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mhnpath/chem/molecule.hpp"

namespace mhnpath::pricing {

inline constexpr double kBuyableThreshold = 100.0;
inline constexpr double kNonBuyableCap = 500.0;

struct Quote {
  std::string source;
  double usd_per_g = 0;
  friend bool operator==(const Quote &, const Quote &) = default;
};

struct CatalogEntry {
  std::string source;
  double usd_per_g = 0;
  std::string retrieved_at;
};

/// Prices in USD per gram keyed by canonical SMILES, one entry per source.
class PriceCatalog {
public:
  /// CSV: canonical_smiles,usd_per_g,source,retrieved_at. Keys are
  /// re-canonicalized. Every bad row is reported in one SyntaxError.
  static PriceCatalog load(const std::filesystem::path &path);
  void save(const std::filesystem::path &path) const;

  /// Adds or replaces the price of `source` for the molecule. Throws
  /// DomainError for negative or non-finite prices.
  void set(const std::string &canonical_smiles, CatalogEntry entry);
  void set(const chem::Molecule &m, CatalogEntry entry);

  const std::vector<CatalogEntry> *entries(const std::string &canonical_smiles) const;
  std::size_t size() const { return entries_.size(); }

  /// Minimum over sources.
  std::optional<double> lookup(const std::string &canonical_smiles) const;

private:
  std::map<std::string, std::vector<CatalogEntry>> entries_;
};

std::optional<double> lookup_price(const PriceCatalog &catalog, const chem::Molecule &m);

struct BuyabilityPolicy {
  double buyable_threshold = kBuyableThreshold;
  double nonbuyable_cap = kNonBuyableCap;
  /// Throws ConfigError unless 0 < threshold <= cap.
  void validate() const;
};

/// Strictly under the threshold.
bool is_buyable(std::optional<double> price, const BuyabilityPolicy &policy = {});
/// min(price, cap); the cap when unpriced.
double effective_cost(std::optional<double> price, const BuyabilityPolicy &policy = {});

struct VendorConfig {
  /// Base URL, e.g. "http://127.0.0.1:8080" or "https://host/api".
  std::string endpoint;
  std::string api_key;
  std::chrono::milliseconds timeout{5000};
  int max_retries = 2;
  /// Upper bound on a single Retry-After wait.
  std::chrono::seconds max_retry_wait{30};
};

/// Reads MHNPATH_VENDOR_KEY into api_key when it is set.
VendorConfig vendor_config_from_env(std::string endpoint);

/// GET {endpoint}/price?smiles=<canonical> with header X-Api-Key.
class VendorClient {
public:
  explicit VendorClient(VendorConfig cfg);
  const VendorConfig &config() const { return cfg_; }

  /// Throws AuthError (401), RateLimited (429 after retries), Timeout
  /// (unreachable or no answer in time), VendorError otherwise.
  std::vector<Quote> fetch_quotes(const chem::Molecule &m) const;

private:
  VendorConfig cfg_;
  std::string origin_;
  std::string base_path_;
};

std::vector<Quote> fetch_quotes(const VendorClient &client, const chem::Molecule &m);

/// Catalog price, optionally refreshed by the vendor. Quotes are merged into
/// the catalog only when merge is set; vendor failures print a warning and
/// fall back to the catalog.
std::optional<double> price_with_quotes(PriceCatalog &catalog, const VendorClient *client,
                                        const chem::Molecule &m, bool merge);

struct SyncReport {
  int updated = 0;
  int failed = 0;
};

/// Fetches quotes for every molecule with up to `parallelism` requests in
/// flight and merges them into the catalog, stamped with the current UTC
/// time. Throws AuthError immediately; other failures are counted.
SyncReport sync_catalog(PriceCatalog &catalog, const VendorClient &client,
                        const std::vector<chem::Molecule> &molecules, int parallelism = 4);

/// Current UTC time as ISO-8601 (seconds precision, 'Z' suffix).
std::string utc_timestamp();

}  // namespace mhnpath::pricing

#endif  // MHNPATH_PRICING_PRICING_HPP
