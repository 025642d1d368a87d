#pragma once

#include <string>
#include <string_view>

#include "dfx/ensemble.hpp"

namespace dfx {

/// Text model format (whitespace-insensitive S-expressions):
///
///   tree        := (leaf LABEL) | (node FEATURE THRESHOLD tree tree)
///   cascade     := (cascade tree+)              first layer first
///   forest      := (forest tree+)
///   deep-forest := (deep-forest MODE (classes INT+) forest+)
///   MODE        := label | class-vector
///   LABEL       := +1 | -1 | INT
///
/// Thresholds are printed in shortest round-trip form.
enum class LabelDomain { Any, Binary };

Model parse_model(std::string_view text, LabelDomain domain = LabelDomain::Any);
Tree parse_tree(std::string_view text, LabelDomain domain = LabelDomain::Any);

std::string print_model(const Model& model);
std::string print_tree(const Tree& tree);

std::string format_label(int label);
/// Shortest decimal that parses back to exactly v.
std::string format_real(double v);

Model read_model_file(const std::string& path);
void write_model_file(const std::string& path, const Model& model);

}  // namespace dfx
