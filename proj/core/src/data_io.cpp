#include "dfx/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <curl/curl.h>
#include <openssl/evp.h>

#include "dfx/error.hpp"
#include "dfx/parallel.hpp"

namespace dfx {

namespace fs = std::filesystem;

void SimulationSpec::validate() const {
  if (n < 1) throw Error(Errc::InvalidArgument, "simulation needs n >= 1");
  if (p != 4) throw Error(Errc::UnsupportedCardinality, "the product distribution lives on [4]");
  if (sample_count < 1) throw Error(Errc::InvalidArgument, "sample_count must be >= 1");
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
    throw Error(Errc::InvalidArgument, "split_fraction must lie in (0, 1)");
  }
}

int round_to_lattice(double v, int p, bool coin) {
  const double lower = std::floor(v);
  int r = static_cast<int>(v - lower < 0.5 ? lower : lower + 1.0);
  if (v - lower == 0.5 && lower >= 1.0 && lower + 1.0 <= p) r = static_cast<int>(coin ? lower + 1.0 : lower);
  return std::clamp(r, 1, p);
}

int noisy_parity_label(std::span<const double> x, int p, Rng& rng) {
  long sum = 0;
  for (double v : x) {
    const bool half = v - std::floor(v) == 0.5;
    sum += round_to_lattice(v, p, half ? rng.coin() : false);
  }
  return sum % 2 == 0 ? +1 : -1;
}

LabeledDataset generate_simulation(const SimulationSpec& spec) {
  spec.validate();
  const LatticeSpace space(spec.n, spec.p);
  const LatticeDistribution dist =
      spec.p == 4 ? LatticeDistribution::product(spec.a) : LatticeDistribution::uniform();
  const auto n = static_cast<std::size_t>(spec.n);
  const std::size_t count = spec.sample_count;

  LabeledDataset data;
  data.width = n;
  data.values.resize(count * n);
  data.labels.resize(count);
  for (std::size_t j = 0; j < n; ++j) data.feature_names.push_back("x" + std::to_string(j + 1));

  constexpr std::size_t kBlock = 65536;
  const std::size_t blocks = (count + kBlock - 1) / kBlock;
  parallel_for(blocks, spec.threads, [&](std::size_t b) {
    const std::size_t begin = b * kBlock;
    const std::size_t rows = std::min(kBlock, count - begin);
    const auto points = sample(dist, space, rows, derive_seed(spec.seed, "sim.points", b));
    Rng noise(derive_seed(spec.seed, "sim.noise", b));
    Rng ties(derive_seed(spec.seed, "sim.ties", b));
    for (std::size_t i = 0; i < rows; ++i) {
      double* x = data.values.data() + (begin + i) * n;
      for (std::size_t j = 0; j < n; ++j) x[j] = static_cast<double>(points[i][j]) + (noise.uniform01() - 0.5);
      data.labels[begin + i] = noisy_parity_label(std::span<const double>(x, n), spec.p, ties);
    }
  });

  std::vector<std::size_t> perm(count);
  for (std::size_t i = 0; i < count; ++i) perm[i] = i;
  Rng shuffle(derive_seed(spec.seed, "sim.split"));
  for (std::size_t i = count; i > 1; --i) std::swap(perm[i - 1], perm[shuffle.below(i)]);
  auto train_count = static_cast<std::size_t>(std::floor(spec.split_fraction * static_cast<double>(count)));
  train_count = std::clamp<std::size_t>(train_count, count > 1 ? 1 : 0, count > 1 ? count - 1 : count);
  data.train_index.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(train_count));
  data.test_index.assign(perm.begin() + static_cast<std::ptrdiff_t>(train_count), perm.end());
  std::sort(data.train_index.begin(), data.train_index.end());
  std::sort(data.test_index.begin(), data.test_index.end());
  return data;
}

// ---------------------------------------------------------------------------

namespace {

std::string format_fixed17(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc()) throw Error(Errc::IoError, "cannot format value");
  return std::string(buf, ptr);
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto at = line.find(sep, start);
    out.push_back(line.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

}  // namespace

void write_csv(const LabeledDataset& data, std::ostream& out) {
  const bool split = data.has_split();
  for (std::size_t j = 0; j < data.width; ++j) out << data.feature_name(j) << ',';
  out << "label" << (split ? ",split\n" : "\n");
  std::vector<char> is_test;
  if (split) {
    is_test.assign(data.size(), 2);
    for (auto i : data.train_index) is_test.at(i) = 0;
    for (auto i : data.test_index) is_test.at(i) = 1;
  }
  std::string line;
  for (std::size_t i = 0; i < data.size(); ++i) {
    line.clear();
    for (double v : data.row(i)) {
      line += format_fixed17(v);
      line += ',';
    }
    line += std::to_string(data.labels[i]);
    if (split) line += is_test[i] == 0 ? ",train" : is_test[i] == 1 ? ",test" : ",";
    line += '\n';
    out << line;
  }
  if (!out) throw Error(Errc::IoError, "CSV write failed");
}

void write_csv(const LabeledDataset& data, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  write_csv(data, out);
}

LabeledDataset read_csv(std::istream& in, LabelDomain domain) {
  LabeledDataset data;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> header;
  std::string header_text;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header_text = line;
      break;
    }
  }
  if (header_text.empty()) throw Error(Errc::EmptyDataset, "CSV input is empty");
  header = split_fields(trim(header_text), ',');
  bool has_split = false;
  if (!header.empty() && trim(header.back()) == "split") {
    has_split = true;
    header.pop_back();
  }
  if (header.empty() || trim(header.back()) != "label") {
    throw ParseError(Errc::MalformedRow, "CSV header must end with a 'label' column", line_no, 1);
  }
  data.width = header.size() - 1;
  for (std::size_t j = 0; j < data.width; ++j) data.feature_names.emplace_back(trim(header[j]));
  const std::size_t expected = header.size() + (has_split ? 1 : 0);

  std::vector<double> row(data.width);
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(trim(line), ',');
    if (fields.size() != expected) {
      throw ParseError(Errc::MalformedRow,
                       "line " + std::to_string(line_no) + ": expected " + std::to_string(expected) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no, 1);
    }
    for (std::size_t j = 0; j < data.width; ++j) {
      if (!parse_number(fields[j], row[j])) {
        throw ParseError(Errc::MalformedRow, "line " + std::to_string(line_no) + ": bad number in column " +
                                                 std::to_string(j + 1), line_no, j + 1);
      }
    }
    int label = 0;
    if (!parse_number(fields[data.width], label)) {
      throw ParseError(Errc::MalformedRow, "line " + std::to_string(line_no) + ": bad label", line_no,
                       data.width + 1);
    }
    if (domain == LabelDomain::Binary && label != 1 && label != -1) {
      throw ParseError(Errc::LabelDomainError,
                       "line " + std::to_string(line_no) + ": label " + std::to_string(label) + " is not +1/-1",
                       line_no, data.width + 1);
    }
    const std::size_t index = data.size();
    data.values.insert(data.values.end(), row.begin(), row.end());
    data.labels.push_back(label);
    if (has_split) {
      const auto tag = trim(fields.back());
      if (tag == "train") {
        data.train_index.push_back(index);
      } else if (tag == "test") {
        data.test_index.push_back(index);
      } else if (!tag.empty()) {
        throw ParseError(Errc::MalformedRow, "line " + std::to_string(line_no) + ": split must be train or test",
                         line_no, expected);
      }
    }
  }
  if (data.empty()) throw Error(Errc::EmptyDataset, "CSV has no data rows");
  return data;
}

LabeledDataset read_csv(const fs::path& path, LabelDomain domain) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  return read_csv(in, domain);
}

// ---------------------------------------------------------------------------

namespace {

UciFormat parse_format(const std::string& s) {
  if (s == "comma") return UciFormat::Comma;
  if (s == "whitespace") return UciFormat::Whitespace;
  if (s == "segment") return UciFormat::Segment;
  throw Error(Errc::InvalidArgument, "unknown dataset format '" + s + "'");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  const fs::path tmp = path.string() + ".part";
  {
    std::ofstream out(tmp, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(Errc::IoError, "cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::size_t write_body(char* data, std::size_t size, std::size_t count, void* user) {
  static_cast<std::string*>(user)->append(data, size * count);
  return size * count;
}

std::string download(const std::string& url, long timeout_seconds) {
  static const bool initialized = curl_global_init(CURL_GLOBAL_DEFAULT) == CURLE_OK;
  if (!initialized) throw Error(Errc::UnreachableSource, "libcurl initialization failed");
  CURL* handle = curl_easy_init();
  if (!handle) throw Error(Errc::UnreachableSource, "libcurl handle allocation failed");
  std::string body;
  curl_easy_setopt(handle, CURLOPT_URL, url.c_str());
  curl_easy_setopt(handle, CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(handle, CURLOPT_FAILONERROR, 1L);
  curl_easy_setopt(handle, CURLOPT_TIMEOUT, timeout_seconds);
  curl_easy_setopt(handle, CURLOPT_WRITEFUNCTION, write_body);
  curl_easy_setopt(handle, CURLOPT_WRITEDATA, &body);
  const CURLcode rc = curl_easy_perform(handle);
  curl_easy_cleanup(handle);
  if (rc != CURLE_OK) throw Error(Errc::UnreachableSource, "download of " + url + " failed: " + curl_easy_strerror(rc));
  return body;
}

std::string file_name_of(const std::string& url) {
  const auto slash = url.find_last_of('/');
  std::string name = slash == std::string::npos ? url : url.substr(slash + 1);
  if (name.empty()) throw Error(Errc::InvalidArgument, "URL has no file name: " + url);
  return name;
}

/// Returns verified bytes for one file of a dataset, downloading on a miss.
std::string acquire(const std::string& url, const std::string& expected_sha, const fs::path& dir,
                    const FetchOptions& options) {
  const fs::path file = dir / file_name_of(url);
  const fs::path pin = file.string() + ".sha256";
  std::string bytes;
  if (fs::exists(file)) {
    bytes = read_file(file);
  } else {
    if (options.offline) {
      throw Error(Errc::UnreachableSource, "offline and " + file.string() + " is not cached");
    }
    bytes = download(url, options.timeout_seconds);
  }
  const std::string actual = sha256_hex(bytes);
  std::string expected = expected_sha;
  if (expected.empty() && fs::exists(pin)) expected = std::string(trim(read_file(pin)));
  if (!expected.empty() && expected != actual) {
    throw Error(Errc::ChecksumMismatch, file.filename().string() + ": sha256 " + actual + " != " + expected);
  }
  fs::create_directories(dir);
  if (!fs::exists(file)) write_file(file, bytes);
  if (!fs::exists(pin)) write_file(pin, actual + "\n");
  return bytes;
}

}  // namespace

std::vector<DatasetManifest> read_manifests(const fs::path& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  if (!fs::exists(path)) throw Error(Errc::IoError, "cannot open manifest " + path.string());
  try {
    pt::ini_parser::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(Errc::SyntaxError, e.message(), e.line(), 1);
  }
  std::vector<DatasetManifest> out;
  for (const auto& [name, section] : tree) {
    try {
      DatasetManifest m;
      m.name = name;
      m.train_url = section.get<std::string>("train_url");
      m.test_url = section.get<std::string>("test_url");
      m.train_sha256 = section.get<std::string>("train_sha256", "");
      m.test_sha256 = section.get<std::string>("test_sha256", "");
      m.format = parse_format(section.get<std::string>("format"));
      m.features = section.get<std::size_t>("features");
      m.classes = section.get<std::size_t>("classes");
      m.train_size = section.get<std::size_t>("train_size");
      m.test_size = section.get<std::size_t>("test_size");
      out.push_back(std::move(m));
    } catch (const pt::ptree_error& e) {
      throw Error(Errc::SyntaxError, "manifest section [" + name + "]: " + e.what());
    }
  }
  return out;
}

DatasetManifest find_manifest(const std::vector<DatasetManifest>& manifests, const std::string& name) {
  for (const auto& m : manifests) {
    if (m.name == name) return m;
  }
  throw Error(Errc::InvalidArgument, "no manifest entry for dataset '" + name + "'");
}

LabeledDataset parse_uci_file(const std::string& text, UciFormat format, std::size_t features) {
  LabeledDataset data;
  data.width = features;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> row(features);
  std::map<std::string, int> names;  // segment class names
  std::vector<std::pair<std::string, std::vector<double>>> named_rows;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    std::vector<std::string_view> fields;
    if (format == UciFormat::Whitespace) {
      std::size_t i = 0;
      while (i < body.size()) {
        while (i < body.size() && (body[i] == ' ' || body[i] == '\t')) ++i;
        const std::size_t start = i;
        while (i < body.size() && body[i] != ' ' && body[i] != '\t') ++i;
        if (i > start) fields.push_back(body.substr(start, i - start));
      }
    } else {
      fields = split_fields(body, ',');
    }
    if (format == UciFormat::Segment) {
      // Header and comment lines do not have a numeric body.
      if (fields.size() != features + 1) continue;
      bool numeric = true;
      for (std::size_t j = 0; j < features && numeric; ++j) numeric = parse_number(fields[j + 1], row[j]);
      if (!numeric) continue;
      named_rows.emplace_back(std::string(trim(fields[0])), row);
      names.emplace(std::string(trim(fields[0])), 0);
      continue;
    }
    if (fields.size() != features + 1) {
      throw ParseError(Errc::MalformedRow,
                       "line " + std::to_string(line_no) + ": expected " + std::to_string(features + 1) + " fields",
                       line_no, 1);
    }
    for (std::size_t j = 0; j < features; ++j) {
      if (!parse_number(fields[j], row[j])) {
        throw ParseError(Errc::MalformedRow, "line " + std::to_string(line_no) + ": bad number", line_no, j + 1);
      }
    }
    int label = 0;
    if (!parse_number(fields[features], label)) {
      throw ParseError(Errc::MalformedRow, "line " + std::to_string(line_no) + ": bad class", line_no, features + 1);
    }
    data.add_row(row, label);
  }
  if (format == UciFormat::Segment) {
    // Class ids follow the alphabetical order of the names.
    int next = 0;
    for (auto& [name, id] : names) id = next++;
    for (const auto& [name, values] : named_rows) data.add_row(values, names.at(name));
  }
  if (data.empty()) throw Error(Errc::EmptyDataset, "dataset file has no rows");
  return data;
}

LabeledDataset fetch_dataset(const DatasetManifest& manifest, const fs::path& cache_dir,
                             const FetchOptions& options) {
  const fs::path dir = cache_dir / manifest.name;
  const std::string train_bytes = acquire(manifest.train_url, manifest.train_sha256, dir, options);
  const std::string test_bytes = acquire(manifest.test_url, manifest.test_sha256, dir, options);
  const LabeledDataset train = parse_uci_file(train_bytes, manifest.format, manifest.features);
  const LabeledDataset test = parse_uci_file(test_bytes, manifest.format, manifest.features);
  auto check = [&](const LabeledDataset& part, std::size_t expected, const char* which) {
    if (expected != 0 && part.size() != expected) {
      throw Error(Errc::MalformedRow, manifest.name + " " + which + " has " + std::to_string(part.size()) +
                                          " rows, manifest says " + std::to_string(expected));
    }
  };
  check(train, manifest.train_size, "train");
  check(test, manifest.test_size, "test");

  LabeledDataset data = train;
  for (std::size_t i = 0; i < test.size(); ++i) data.add_row(test.row(i), test.labels[i]);
  data.train_index.resize(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) data.train_index[i] = i;
  for (std::size_t i = 0; i < test.size(); ++i) data.test_index.push_back(train.size() + i);
  if (manifest.classes != 0 && data.classes().size() != manifest.classes) {
    throw Error(Errc::MalformedRow, manifest.name + " has " + std::to_string(data.classes().size()) +
                                        " classes, manifest says " + std::to_string(manifest.classes));
  }
  return data;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(Errc::IoError, "sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

fs::path default_cache_dir() {
  if (const char* env = std::getenv("DFX_CACHE_DIR"); env && *env) return env;
  return "cache";
}

}  // namespace dfx
