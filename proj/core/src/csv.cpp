#include "sfde/csv.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sfde {

std::string format_csv_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void write_path_csv(std::ostream& os, const PathResult& result) {
    os << "time";
    for (int c = 0; c < result.dim; ++c) os << ",x" << c;
    for (int c = 0; c < result.control_dim; ++c) os << ",u" << c;
    os << ",in_G\n";

    const int total = static_cast<int>(result.trajectory.size()) / result.dim;
    const int steps = result.steps_taken();
    for (int i = 0; i < total; ++i) {
        const double t = result.time_of_index(i);
        os << format_csv_double(t);
        const auto x = result.state_at_index(i);
        for (int c = 0; c < result.dim; ++c) os << ',' << format_csv_double(x[c]);
        const int step = i - result.history_steps;
        if (step >= 0 && step < steps) {
            for (int c = 0; c < result.control_dim; ++c)
                os << ','
                   << format_csv_double(
                          result.control_trace[static_cast<std::size_t>(step) * result.control_dim + c]);
        } else {
            for (int c = 0; c < result.control_dim; ++c) os << ',';
        }
        if (step < 0) {
            os << ",\n"; // history rows precede the region's domain
        } else if (step < steps) {
            os << ",1\n";
        } else {
            os << (result.censored ? ",1\n" : ",0\n");
        }
    }
}

void write_batch_csv(std::ostream& os, const BatchEstimate& batch) {
    os << "mean,std_error,n_paths,master_seed,censored_fraction\n"
       << format_csv_double(batch.estimate.mean) << ','
       << format_csv_double(batch.estimate.std_error) << ',' << batch.estimate.n_paths << ','
       << batch.estimate.master_seed << ',' << format_csv_double(batch.censored_fraction) << '\n';
}

void write_ranking_csv(std::ostream& os, const PolicyRanking& ranking) {
    os << "law_id,mean,std_error,censored_fraction\n";
    for (const auto& row : ranking.rows) {
        os << row.law_id << ',' << format_csv_double(row.estimate.mean) << ','
           << format_csv_double(row.estimate.std_error) << ','
           << format_csv_double(row.censored_fraction) << '\n';
    }
}

void write_mcurve_csv(std::ostream& os, const CandidateValueReport& curve) {
    os << "control,m_value\n";
    for (std::size_t i = 0; i < curve.controls.size(); ++i)
        os << format_csv_double(curve.controls[i]) << ','
           << format_csv_double(curve.m_values[i]) << '\n';
}

void write_mcurve_csv(std::ostream& os, const ControlGrid& grid, const HJBReport& report) {
    os << "control,value\n";
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        const auto& point = grid.points[i];
        for (std::size_t c = 0; c < point.size(); ++c) {
            if (c > 0) os << ';';
            os << format_csv_double(point[c]);
        }
        os << ',' << format_csv_double(report.per_control_values[i]) << '\n';
    }
}

void write_generator_csv_header(std::ostream& os) {
    os << "record,a_mean,a_std_error,b_mean,b_std_error,h,gap,censored_fraction\n";
}

void write_generator_csv_row(std::ostream& os, const GeneratorReport& report) {
    os << "generator," << format_csv_double(report.analytic) << ",0,"
       << format_csv_double(report.monte_carlo.mean) << ','
       << format_csv_double(report.monte_carlo.std_error) << ','
       << format_csv_double(report.h_used) << ',' << format_csv_double(report.discrepancy)
       << ",\n";
}

void write_generator_csv_row(std::ostream& os, const DynkinReport& report) {
    os << "dynkin," << format_csv_double(report.lhs.mean) << ','
       << format_csv_double(report.lhs.std_error) << ',' << format_csv_double(report.rhs.mean)
       << ',' << format_csv_double(report.rhs.std_error) << ",,"
       << format_csv_double(report.gap) << ",\n";
}

void write_generator_csv_row(std::ostream& os, const DirichletReport& report) {
    os << "dirichlet," << format_csv_double(report.estimate.mean) << ','
       << format_csv_double(report.estimate.std_error) << ",,,,,"
       << format_csv_double(report.censored_fraction) << '\n';
}

void write_segment_csv(std::ostream& os, const SegmentPath& segment) {
    os << "offset";
    for (int c = 0; c < segment.dim(); ++c) os << ",v" << c;
    os << '\n';
    for (int i = 0; i < segment.points(); ++i) {
        os << format_csv_double((i - segment.history_steps()) * segment.dt());
        const auto v = segment.value(i);
        for (int c = 0; c < segment.dim(); ++c) os << ',' << format_csv_double(v[c]);
        os << '\n';
    }
}

SegmentPath read_segment_csv(std::istream& is, double dt) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("segment csv: empty file");
    int dim = -1;
    std::vector<double> values;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        std::vector<double> fields;
        while (std::getline(row, cell, ',')) {
            try {
                fields.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::invalid_argument("segment csv: bad number '" + cell + "'");
            }
        }
        if (fields.size() < 2) throw std::invalid_argument("segment csv: row needs offset and value");
        const int row_dim = static_cast<int>(fields.size()) - 1;
        if (dim < 0) dim = row_dim;
        if (row_dim != dim) throw std::invalid_argument("segment csv: inconsistent row width");
        values.insert(values.end(), fields.begin() + 1, fields.end());
    }
    if (values.empty()) throw std::invalid_argument("segment csv: no samples");
    return SegmentPath(std::move(values), dim, dt);
}

} // namespace sfde
