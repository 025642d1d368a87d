#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dfx/learn.hpp"
#include "dfx/lattice.hpp"
#include "dfx/model_format.hpp"
#include "dfx/rng.hpp"

namespace dfx {

// ---------------------------------------------------------------------------
// Noisy parity simulation

struct SimulationSpec {
  int n = 2;
  int p = 4;
  Rational a{3, 1};
  std::uint64_t sample_count = 100'000;
  double split_fraction = 0.7;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  void validate() const;
};

/// Nearest lattice value of v in [1, p]. An exact half between two valid
/// values is settled by `coin` (true picks the larger).
int round_to_lattice(double v, int p, bool coin);

/// Parity of the rounded point; exact-half ties draw from rng.
int noisy_parity_label(std::span<const double> x, int p, Rng& rng);

/// x = lattice sample + uniform noise in [-0.5, 0.5)^n, y = parity(round(x)).
/// Rows are generated in fixed blocks with per-block streams, then split by a
/// seeded shuffle (stored sorted in train_index / test_index).
LabeledDataset generate_simulation(const SimulationSpec& spec);

// ---------------------------------------------------------------------------
// CSV

/// Header: feature names, "label", and "split" (train/test) when the dataset
/// has a split. Reals use 17 significant digits.
void write_csv(const LabeledDataset& data, std::ostream& out);
void write_csv(const LabeledDataset& data, const std::filesystem::path& path);

LabeledDataset read_csv(std::istream& in, LabelDomain domain = LabelDomain::Any);
LabeledDataset read_csv(const std::filesystem::path& path, LabelDomain domain = LabelDomain::Any);

// ---------------------------------------------------------------------------
// UCI benchmark data

enum class UciFormat { Comma, Whitespace, Segment };

struct DatasetManifest {
  std::string name;
  std::string train_url;
  std::string test_url;
  std::string train_sha256;  // empty: pin on first download
  std::string test_sha256;
  UciFormat format = UciFormat::Comma;
  std::size_t features = 0;
  std::size_t classes = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

/// One INI section per dataset.
std::vector<DatasetManifest> read_manifests(const std::filesystem::path& path);
DatasetManifest find_manifest(const std::vector<DatasetManifest>& manifests, const std::string& name);

struct FetchOptions {
  bool offline = false;
  long timeout_seconds = 120;
};

/// Cached files live in cache_dir/<name>/. A file is verified against the
/// manifest checksum when one is given, otherwise against the checksum
/// recorded next to it on first download. A warm cache makes no network
/// request. Parsed sizes are checked against the manifest.
LabeledDataset fetch_dataset(const DatasetManifest& manifest, const std::filesystem::path& cache_dir,
                             const FetchOptions& options = {});

/// Parses one file of the dataset (e.g. for pre-seeded caches).
LabeledDataset parse_uci_file(const std::string& text, UciFormat format, std::size_t features);

std::string sha256_hex(std::string_view bytes);

/// Cache directory from DFX_CACHE_DIR, else ./cache.
std::filesystem::path default_cache_dir();

}  // namespace dfx
