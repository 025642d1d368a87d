#include "dfx/model_format.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "dfx/error.hpp"

namespace dfx {

namespace {

struct SExpr {
  bool is_atom = false;
  std::string atom;
  std::vector<SExpr> items;
  std::size_t line = 1;
  std::size_t column = 1;
};

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  SExpr read_top() {
    skip_space();
    if (at_end()) fail(Errc::SyntaxError, "empty model text");
    SExpr e = read();
    skip_space();
    if (!at_end()) fail(Errc::SyntaxError, "trailing input after model");
    return e;
  }

 private:
  [[noreturn]] void fail(Errc code, const std::string& what) const { throw ParseError(code, what, line_, column_); }

  bool at_end() const { return pos_ >= text_.size(); }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (!at_end()) {
      const char c = text_[pos_];
      if (c == ';') {
        while (!at_end() && text_[pos_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr read() {
    SExpr e;
    e.line = line_;
    e.column = column_;
    const char c = text_[pos_];
    if (c == ')') fail(Errc::SyntaxError, "unexpected ')'");
    if (c == '(') {
      advance();
      for (;;) {
        skip_space();
        if (at_end()) throw ParseError(Errc::SyntaxError, "unclosed '('", e.line, e.column);
        if (text_[pos_] == ')') {
          advance();
          return e;
        }
        e.items.push_back(read());
      }
    }
    e.is_atom = true;
    while (!at_end()) {
      const char d = text_[pos_];
      if (d == '(' || d == ')' || d == ' ' || d == '\t' || d == '\n' || d == '\r' || d == ';') break;
      e.atom.push_back(d);
      advance();
    }
    return e;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

[[noreturn]] void fail_at(const SExpr& e, Errc code, const std::string& what) {
  throw ParseError(code, what, e.line, e.column);
}

const std::string& head_of(const SExpr& e) {
  if (e.is_atom) fail_at(e, Errc::SyntaxError, "expected '(' but found '" + e.atom + "'");
  if (e.items.empty() || !e.items.front().is_atom) fail_at(e, Errc::SyntaxError, "expected a form keyword");
  return e.items.front().atom;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

const SExpr& atom_at(const SExpr& form, std::size_t i) {
  const SExpr& a = form.items[i];
  if (!a.is_atom) fail_at(a, Errc::SyntaxError, "expected an atom");
  return a;
}

int read_label(const SExpr& a, LabelDomain domain) {
  if (!a.is_atom) fail_at(a, Errc::LabelDomainError, "label must be an integer");
  int v = 0;
  if (!parse_number(a.atom, v)) fail_at(a, Errc::LabelDomainError, "label '" + a.atom + "' is not an integer");
  if (domain == LabelDomain::Binary && v != 1 && v != -1) {
    fail_at(a, Errc::LabelDomainError, "label '" + a.atom + "' is not +1 or -1");
  }
  return v;
}

Tree read_tree(const SExpr& e, LabelDomain domain) {
  const std::string& head = head_of(e);
  if (head == "leaf") {
    if (e.items.size() != 2) fail_at(e, Errc::ArityError, "(leaf LABEL) takes exactly one argument");
    return Tree::leaf(read_label(e.items[1], domain));
  }
  if (head == "node") {
    if (e.items.size() != 5) fail_at(e, Errc::ArityError, "(node FEATURE THRESHOLD LEFT RIGHT) takes four arguments");
    const SExpr& f = atom_at(e, 1);
    int feature = 0;
    if (!parse_number(f.atom, feature) || feature < 1) {
      fail_at(f, Errc::SyntaxError, "feature index '" + f.atom + "' must be a positive integer");
    }
    const SExpr& t = atom_at(e, 2);
    double threshold = 0.0;
    if (!parse_number(t.atom, threshold) || !std::isfinite(threshold)) {
      fail_at(t, Errc::SyntaxError, "threshold '" + t.atom + "' is not a finite number");
    }
    return Tree::node(feature, threshold, read_tree(e.items[3], domain), read_tree(e.items[4], domain));
  }
  fail_at(e, Errc::SyntaxError, "expected leaf or node, found '" + head + "'");
}

std::vector<Tree> read_members(const SExpr& e, std::size_t first, LabelDomain domain) {
  if (e.items.size() <= first) fail_at(e, Errc::ArityError, "(" + e.items.front().atom + " ...) needs at least one tree");
  std::vector<Tree> trees;
  for (std::size_t i = first; i < e.items.size(); ++i) trees.push_back(read_tree(e.items[i], domain));
  return trees;
}

Model read_model(const SExpr& e, LabelDomain domain) {
  const std::string& head = head_of(e);
  if (head == "leaf" || head == "node") return read_tree(e, domain);
  if (head == "forest") return Forest::unrestricted(read_members(e, 1, domain));
  if (head == "cascade") return DeepTree::unrestricted(read_members(e, 1, domain));
  if (head == "deep-forest") {
    if (e.items.size() < 4) fail_at(e, Errc::ArityError, "(deep-forest MODE (classes ...) forest+) is incomplete");
    const SExpr& mode_atom = atom_at(e, 1);
    AugmentMode mode{};
    if (mode_atom.atom == "label") {
      mode = AugmentMode::Label;
    } else if (mode_atom.atom == "class-vector") {
      mode = AugmentMode::ClassVector;
    } else {
      fail_at(mode_atom, Errc::SyntaxError, "unknown augment mode '" + mode_atom.atom + "'");
    }
    const SExpr& cls = e.items[2];
    if (head_of(cls) != "classes") fail_at(cls, Errc::SyntaxError, "expected (classes ...)");
    if (cls.items.size() < 2) fail_at(cls, Errc::ArityError, "(classes ...) needs at least one class");
    std::vector<int> classes;
    for (std::size_t i = 1; i < cls.items.size(); ++i) classes.push_back(read_label(cls.items[i], LabelDomain::Any));
    std::vector<Forest> layers;
    for (std::size_t i = 3; i < e.items.size(); ++i) {
      if (head_of(e.items[i]) != "forest") fail_at(e.items[i], Errc::SyntaxError, "deep-forest layers must be forests");
      layers.push_back(Forest::unrestricted(read_members(e.items[i], 1, domain)));
    }
    return DeepForest(std::move(layers), std::move(classes), mode);
  }
  fail_at(e, Errc::SyntaxError, "unknown model form '" + head + "'");
}

void print_tree_to(std::ostringstream& os, const Tree& tree, std::size_t i) {
  const TreeNode& n = tree.nodes()[i];
  if (n.is_leaf()) {
    os << "(leaf " << format_label(n.label) << ')';
    return;
  }
  os << "(node " << n.feature << ' ' << format_real(n.threshold) << ' ';
  print_tree_to(os, tree, static_cast<std::size_t>(n.left));
  os << ' ';
  print_tree_to(os, tree, static_cast<std::size_t>(n.right));
  os << ')';
}

void print_members(std::ostringstream& os, const std::vector<Tree>& trees, const std::string& indent) {
  for (const auto& t : trees) {
    os << '\n' << indent;
    print_tree_to(os, t, 0);
  }
}

}  // namespace

std::string format_label(int label) {
  if (label == 1) return "+1";
  return std::to_string(label);
}

std::string format_real(double v) {
  if (v == 0.0) v = 0.0;
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

Model parse_model(std::string_view text, LabelDomain domain) {
  Reader reader(text);
  return read_model(reader.read_top(), domain);
}

Tree parse_tree(std::string_view text, LabelDomain domain) {
  Reader reader(text);
  return read_tree(reader.read_top(), domain);
}

std::string print_tree(const Tree& tree) {
  std::ostringstream os;
  print_tree_to(os, tree, 0);
  return os.str();
}

std::string print_model(const Model& model) {
  std::ostringstream os;
  if (const auto* t = std::get_if<Tree>(&model)) {
    print_tree_to(os, *t, 0);
  } else if (const auto* f = std::get_if<Forest>(&model)) {
    os << "(forest";
    print_members(os, f->trees(), "  ");
    os << ')';
  } else if (const auto* dt = std::get_if<DeepTree>(&model)) {
    os << "(cascade";
    print_members(os, dt->layers(), "  ");
    os << ')';
  } else if (const auto* df = std::get_if<DeepForest>(&model)) {
    os << "(deep-forest " << (df->mode() == AugmentMode::Label ? "label" : "class-vector") << " (classes";
    for (int c : df->classes()) os << ' ' << format_label(c);
    os << ')';
    for (const auto& layer : df->layers()) {
      os << "\n  (forest";
      print_members(os, layer.trees(), "    ");
      os << ')';
    }
    os << ')';
  }
  os << '\n';
  return os.str();
}

Model read_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open model file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

void write_model_file(const std::string& path, const Model& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write model file " + path);
  out << print_model(model);
}

}  // namespace dfx
