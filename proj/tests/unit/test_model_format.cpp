#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "dfx/error.hpp"
#include "dfx/model_format.hpp"
#include "test_util.hpp"

using namespace dfx;

TEST(ModelFormat, ParsesLeafAndStump) {
  EXPECT_EQ(parse_tree("(leaf +1)"), Tree::leaf(1));
  EXPECT_EQ(parse_tree("(node 1 1 (leaf -1) (leaf +1))"), Tree::node(1, 1, Tree::leaf(-1), Tree::leaf(1)));
  EXPECT_EQ(parse_tree("  ( node 1 1\n (leaf -1)\t(leaf +1) ) ; trailing comment"),
            Tree::node(1, 1, Tree::leaf(-1), Tree::leaf(1)));
}

TEST(ModelFormat, PrintsCanonically) {
  EXPECT_EQ(print_tree(Tree::node(1, 2.5, Tree::leaf(-1), Tree::leaf(7))), "(node 1 2.5 (leaf -1) (leaf 7))");
  EXPECT_EQ(format_label(1), "+1");
  EXPECT_EQ(format_label(-1), "-1");
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(format_real(3), "3");
}

TEST(ModelFormat, RealsRoundTripExactly) {
  testutil::Random rnd(9);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(static_cast<double>(rnd.below(1u << 30)) + 0.1, static_cast<int>(rnd.below(80)) - 40);
    EXPECT_EQ(std::stod(format_real(v)), v);
  }
}

TEST(ModelFormat, RandomTreesRoundTrip) {
  testutil::Random rnd(21);
  for (int i = 0; i < 100; ++i) {
    const Tree t = rnd.real_tree(4, 1 + rnd.below(15), 5);
    const std::string text = print_tree(t);
    EXPECT_EQ(parse_tree(text), t);
    EXPECT_EQ(print_tree(parse_tree(text)), text);
  }
}

TEST(ModelFormat, EnsemblesRoundTrip) {
  testutil::Random rnd(5);
  const Forest f = Forest::unrestricted({rnd.real_tree(3, 3, 2), rnd.real_tree(3, 5, 2), Tree::leaf(1)});
  const Model fm = f;
  EXPECT_EQ(std::get<Forest>(parse_model(print_model(fm))), f);
  const DeepTree dt = DeepTree::unrestricted({rnd.real_tree(2, 4, 2), rnd.real_tree(3, 2, 2)});
  EXPECT_EQ(std::get<DeepTree>(parse_model(print_model(dt))), dt);
  const DeepForest df({f, Forest::unrestricted({rnd.real_tree(6, 3, 2)})}, {-1, 1}, AugmentMode::ClassVector);
  const Model back = parse_model(print_model(df));
  EXPECT_EQ(std::get<DeepForest>(back), df);
  EXPECT_EQ(print_model(back), print_model(df));
}

TEST(ModelFormat, SyntaxErrorsCarryPositions) {
  try {
    parse_tree("(leaf +1)\n(node 1 1 (leaf -1) (leaf +1)");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), Errc::SyntaxError);
    EXPECT_GE(e.line(), 2u);
  }
  try {
    parse_tree("(node 1 1\n   (leaf -1)\n   (lef +1))");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), Errc::SyntaxError);
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 4u);
  }
}

TEST(ModelFormat, ArityAndDomainErrors) {
  auto code_of = [](const char* text, LabelDomain d = LabelDomain::Any) {
    try {
      parse_model(text, d);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::IoError;
  };
  EXPECT_EQ(code_of("(node 1 1 (leaf -1))"), Errc::ArityError);
  EXPECT_EQ(code_of("(leaf)"), Errc::ArityError);
  EXPECT_EQ(code_of("(forest)"), Errc::ArityError);
  EXPECT_EQ(code_of("(leaf 3)", LabelDomain::Binary), Errc::LabelDomainError);
  EXPECT_EQ(code_of("(leaf 3)"), Errc::IoError);  // fine outside the binary domain
  EXPECT_EQ(code_of("(node x 1 (leaf -1) (leaf +1))"), Errc::SyntaxError);
  EXPECT_EQ(code_of("(tree)"), Errc::SyntaxError);
  EXPECT_EQ(code_of(""), Errc::SyntaxError);
}

TEST(ModelFormat, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "dfx_model_format_test.sexp";
  const Model m = testutil::parity22_tree();
  write_model_file(path.string(), m);
  EXPECT_EQ(std::get<Tree>(read_model_file(path.string())), testutil::parity22_tree());
  std::filesystem::remove(path);
  EXPECT_THROW(read_model_file(path.string()), Error);
}
