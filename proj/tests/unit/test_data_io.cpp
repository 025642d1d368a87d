#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dfx/data_io.hpp"
#include "dfx/error.hpp"
#include "test_util.hpp"

using namespace dfx;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dfx_data_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string file_url(const fs::path& path) { return "file://" + fs::absolute(path).string(); }

std::uint64_t bits(double v) {
  std::uint64_t b;
  std::memcpy(&b, &v, sizeof b);
  return b;
}

}  // namespace

TEST(Rounding, Examples) {
  EXPECT_EQ(round_to_lattice(1.3, 4, false), 1);
  EXPECT_EQ(round_to_lattice(2.4, 4, true), 2);
  EXPECT_EQ(round_to_lattice(0.6, 4, false), 1);
  EXPECT_EQ(round_to_lattice(4.49, 4, false), 4);
  EXPECT_EQ(round_to_lattice(-3.0, 4, true), 1);
  EXPECT_EQ(round_to_lattice(9.0, 4, false), 4);
  EXPECT_EQ(round_to_lattice(2.5, 4, false), 2);
  EXPECT_EQ(round_to_lattice(2.5, 4, true), 3);
  // Halves outside the range have only one valid neighbour.
  EXPECT_EQ(round_to_lattice(0.5, 4, false), 1);
  EXPECT_EQ(round_to_lattice(4.5, 4, true), 4);
}

TEST(Rounding, NoiselessCorner) {
  Rng rng(1);
  EXPECT_EQ(noisy_parity_label(std::vector<double>{1.3, 2.4}, 4, rng), -1);
  EXPECT_EQ(noisy_parity_label(std::vector<double>{1.3, 2.6}, 4, rng), 1);
}

TEST(Simulation, ShapeSplitAndDeterminism) {
  SimulationSpec spec;
  spec.n = 3;
  spec.sample_count = 1000;
  spec.seed = 5;
  const LabeledDataset d = generate_simulation(spec);
  EXPECT_EQ(d.size(), 1000u);
  EXPECT_EQ(d.width, 3u);
  EXPECT_EQ(d.train_index.size(), 700u);
  EXPECT_EQ(d.test_index.size(), 300u);
  std::vector<bool> seen(d.size(), false);
  for (auto i : d.train_index) seen[i] = true;
  for (auto i : d.test_index) {
    EXPECT_FALSE(seen[i]);
    seen[i] = true;
  }
  EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
  EXPECT_TRUE(std::is_sorted(d.train_index.begin(), d.train_index.end()));

  const LabeledDataset again = generate_simulation(spec);
  EXPECT_EQ(again.values, d.values);
  EXPECT_EQ(again.labels, d.labels);
  EXPECT_EQ(again.train_index, d.train_index);
  spec.threads = 3;
  EXPECT_EQ(generate_simulation(spec).values, d.values);
  spec.seed = 6;
  EXPECT_NE(generate_simulation(spec).values, d.values);
}

TEST(Simulation, LabelsAreParityOfRoundedPoints) {
  SimulationSpec spec;
  spec.n = 4;
  spec.sample_count = 5000;
  spec.seed = 2;
  const LabeledDataset d = generate_simulation(spec);
  for (std::size_t i = 0; i < d.size(); ++i) {
    Point x;
    for (double v : d.row(i)) {
      ASSERT_GE(v, 0.5);
      ASSERT_LT(v, 4.5);
      x.push_back(static_cast<Coord>(std::floor(v + 0.5)));
    }
    EXPECT_EQ(d.labels[i], testutil::parity_by_sum(x));
  }
}

TEST(Simulation, LabelBalanceMatchesExactWeights) {
  // f_i = (1, a, a^i, 1) / (2 + a + a^i) with a = 3.
  const double a = 3;
  double f[2][4];
  for (int i = 0; i < 2; ++i) {
    const double ai = std::pow(a, i + 1);
    const double z = 2 + a + ai;
    f[i][0] = 1 / z;
    f[i][1] = a / z;
    f[i][2] = ai / z;
    f[i][3] = 1 / z;
  }
  double positive = 0;
  for (int x1 = 1; x1 <= 4; ++x1) {
    for (int x2 = 1; x2 <= 4; ++x2) {
      if ((x1 + x2) % 2 == 0) positive += f[0][x1 - 1] * f[1][x2 - 1];
    }
  }
  SimulationSpec spec;
  spec.n = 2;
  spec.sample_count = 100000;
  spec.seed = 13;
  const LabeledDataset d = generate_simulation(spec);
  const double empirical =
      static_cast<double>(std::count(d.labels.begin(), d.labels.end(), 1)) / static_cast<double>(d.size());
  EXPECT_NEAR(empirical, positive, 0.02);
}

TEST(Simulation, RejectsBadSpecs) {
  SimulationSpec spec;
  spec.sample_count = 0;
  EXPECT_THROW(generate_simulation(spec), Error);
  spec = {};
  spec.split_fraction = 1.5;
  EXPECT_THROW(generate_simulation(spec), Error);
  spec = {};
  spec.p = 3;
  EXPECT_THROW(generate_simulation(spec), Error);
}

TEST(Csv, RoundTripIsBitExact) {
  SimulationSpec spec;
  spec.n = 3;
  spec.sample_count = 500;
  spec.seed = 8;
  LabeledDataset d = generate_simulation(spec);
  d.add_row(std::vector<double>{1e-300, -0.0, 0.1 + 0.2}, 1);
  d.test_index.push_back(d.size() - 1);
  std::stringstream buf;
  write_csv(d, buf);
  const LabeledDataset back = read_csv(buf);
  ASSERT_EQ(back.size(), d.size());
  ASSERT_EQ(back.width, d.width);
  for (std::size_t i = 0; i < d.values.size(); ++i) ASSERT_EQ(bits(back.values[i]), bits(d.values[i])) << i;
  EXPECT_EQ(back.labels, d.labels);
  EXPECT_EQ(back.train_index, d.train_index);
  EXPECT_EQ(back.test_index, d.test_index);
}

TEST(Csv, HeaderNamesAndNoSplit) {
  LabeledDataset d;
  d.width = 2;
  d.feature_names = {"height", "width"};
  d.add_row(std::vector<double>{1.5, 2}, 3);
  std::stringstream buf;
  write_csv(d, buf);
  std::string header;
  std::getline(buf, header);
  EXPECT_EQ(header, "height,width,label");
  buf.seekg(0);
  const LabeledDataset back = read_csv(buf);
  EXPECT_EQ(back.feature_names, d.feature_names);
  EXPECT_FALSE(back.has_split());
}

TEST(Csv, Errors) {
  std::istringstream bad_row("x1,x2,label\n1,2,1\n1,oops,1\n");
  try {
    read_csv(bad_row);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), Errc::MalformedRow);
    EXPECT_EQ(e.line(), 3u);
  }
  std::istringstream short_row("x1,x2,label\n1,1\n");
  try {
    read_csv(short_row);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), Errc::MalformedRow);
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream header_only("x1,label\n");
  try {
    read_csv(header_only);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyDataset);
  }
  std::istringstream three("x1,label\n1,3\n");
  try {
    read_csv(three, LabelDomain::Binary);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::LabelDomainError);
  }
}

TEST(Uci, ParseFormats) {
  const auto comma = parse_uci_file("1,2,3\n4, 5 ,6\n\n", UciFormat::Comma, 2);
  EXPECT_EQ(comma.size(), 2u);
  EXPECT_EQ(comma.labels, (std::vector<int>{3, 6}));
  EXPECT_EQ(comma.row(1)[1], 5.0);
  const auto ws = parse_uci_file("1 2  3\n\t4 5 6\n", UciFormat::Whitespace, 2);
  EXPECT_EQ(ws.labels, (std::vector<int>{3, 6}));
  const std::string segment =
      "region-centroid-col,region-centroid-row\n"
      "\n"
      "SKY,1.0,2.0\n"
      "BRICKFACE,3,4\n"
      "SKY,5,6\n"
      "CEMENT,7,8\n";
  const auto seg = parse_uci_file(segment, UciFormat::Segment, 2);
  ASSERT_EQ(seg.size(), 4u);
  EXPECT_EQ(seg.labels, (std::vector<int>{2, 0, 2, 1}));  // BRICKFACE < CEMENT < SKY
  EXPECT_EQ(seg.row(3)[0], 7.0);
  try {
    parse_uci_file("1,2,3\n1,2\n", UciFormat::Comma, 2);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), Errc::MalformedRow);
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Uci, Sha256) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Uci, FetchPinsChecksumsAndUsesTheCache) {
  const fs::path dir = scratch("fetch");
  const fs::path src = dir / "src";
  fs::create_directories(src);
  write_text(src / "toy.tra", "1,2,0\n3,4,1\n5,6,1\n");
  write_text(src / "toy.tes", "7,8,0\n");
  DatasetManifest m;
  m.name = "toy";
  m.train_url = file_url(src / "toy.tra");
  m.test_url = file_url(src / "toy.tes");
  m.features = 2;
  m.classes = 2;
  m.train_size = 3;
  m.test_size = 1;
  const fs::path cache = dir / "cache";

  // Cold cache and offline: nothing to read.
  try {
    fetch_dataset(m, cache, {.offline = true});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnreachableSource);
  }

  const LabeledDataset d = fetch_dataset(m, cache);
  EXPECT_EQ(d.size(), 4u);
  EXPECT_EQ(d.train_index, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(d.test_index, (std::vector<std::size_t>{3}));
  EXPECT_TRUE(fs::exists(cache / "toy" / "toy.tra"));
  std::ifstream pin(cache / "toy" / "toy.tra.sha256");
  std::string pinned;
  pin >> pinned;
  EXPECT_EQ(pinned, sha256_hex("1,2,0\n3,4,1\n5,6,1\n"));

  // Warm cache: the source can vanish and offline still works, identically.
  fs::remove_all(src);
  const LabeledDataset warm = fetch_dataset(m, cache, {.offline = true});
  EXPECT_EQ(warm.values, d.values);
  EXPECT_EQ(warm.labels, d.labels);

  // A tampered cache no longer matches its pin.
  write_text(cache / "toy" / "toy.tra", "1,2,0\n3,4,1\n5,6,0\n");
  try {
    fetch_dataset(m, cache, {.offline = true});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ChecksumMismatch);
  }
}

TEST(Uci, ManifestChecksumAndSizes) {
  const fs::path dir = scratch("manifest");
  write_text(dir / "a.data", "1,0\n2,1\n");
  DatasetManifest m;
  m.name = "a";
  m.train_url = file_url(dir / "a.data");
  m.test_url = file_url(dir / "a.data");
  m.features = 1;
  m.train_sha256 = std::string(64, '0');
  try {
    fetch_dataset(m, dir / "cache");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ChecksumMismatch);
  }
  m.train_sha256 = sha256_hex("1,0\n2,1\n");
  m.train_size = 3;
  EXPECT_THROW(fetch_dataset(m, dir / "cache2"), Error);
  m.train_size = 2;
  EXPECT_EQ(fetch_dataset(m, dir / "cache3").size(), 4u);
}

TEST(Uci, UnreachableUrl) {
  const fs::path dir = scratch("unreachable");
  DatasetManifest m;
  m.name = "gone";
  m.train_url = file_url(dir / "missing.data");
  m.test_url = m.train_url;
  m.features = 1;
  try {
    fetch_dataset(m, dir / "cache");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnreachableSource);
  }
}

TEST(Uci, ShippedManifest) {
  const auto all = read_manifests(fs::path(DFX_SOURCE_DIR) / "data" / "uci_manifest.ini");
  ASSERT_EQ(all.size(), 3u);
  const auto seg = find_manifest(all, "segment");
  EXPECT_EQ(seg.format, UciFormat::Segment);
  EXPECT_EQ(seg.features, 19u);
  EXPECT_EQ(seg.classes, 7u);
  const auto pen = find_manifest(all, "pendigits");
  EXPECT_EQ(pen.features, 16u);
  EXPECT_EQ(pen.train_size + pen.test_size, 10992u);
  EXPECT_THROW(find_manifest(all, "mnist"), Error);
}
