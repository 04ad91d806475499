#pragma once

#include <iosfwd>
#include <string>

#include "sfde/generator.hpp"
#include "sfde/optimizer.hpp"
#include "sfde/path_result.hpp"
#include "sfde/portfolio.hpp"

namespace sfde {

/// Shortest round-trip decimal form ("%.17g"), locale-independent digits.
std::string format_csv_double(double value);

/// time, state components, control components, in_G flag. History rows and
/// the exit row carry empty control fields.
void write_path_csv(std::ostream& os, const PathResult& result);

/// One line: mean, std_error, n_paths, master_seed, censored_fraction.
void write_batch_csv(std::ostream& os, const BatchEstimate& batch);

/// law_id, mean, std_error, censored_fraction — best law first.
void write_ranking_csv(std::ostream& os, const PolicyRanking& ranking);

/// control, value rows of a control sweep.
void write_mcurve_csv(std::ostream& os, const CandidateValueReport& curve);
void write_mcurve_csv(std::ostream& os, const ControlGrid& grid, const HJBReport& report);

/// Shared schema for the generator-family records:
/// record, a_mean, a_std_error, b_mean, b_std_error, h, gap.
void write_generator_csv_header(std::ostream& os);
void write_generator_csv_row(std::ostream& os, const GeneratorReport& report);
void write_generator_csv_row(std::ostream& os, const DynkinReport& report);
void write_generator_csv_row(std::ostream& os, const DirichletReport& report);

/// offset, value components — one row per history sample.
void write_segment_csv(std::ostream& os, const SegmentPath& segment);
SegmentPath read_segment_csv(std::istream& is, double dt);

} // namespace sfde
