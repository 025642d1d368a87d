#pragma once

#include <string>

#include "dfx/analysis.hpp"
#include "dfx/experiment.hpp"

namespace dfx {

/// Test accuracy against total leaves (log axis), one line per model (and
/// tree size, when set) for the rows of one dataset. Throws EmptyTable when
/// no row matches. Output depends only on the input.
std::string render_accuracy_plot(const ResultTable& table, const std::string& dataset);

/// One bar group per feature, one bar per cut.
std::string render_gain_bars(const GainMap& map, const std::string& title);

}  // namespace dfx
