#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "model.hpp"
#include "pmmh.hpp"

namespace hawkes {

namespace detail {

/// 17 significant digits: shortest text that round-trips any double.
[[nodiscard]] inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

[[nodiscard]] inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

[[nodiscard]] inline std::string strip(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

[[nodiscard]] inline double parse_double(const std::string& text, const std::string& path,
                                         std::size_t row) {
    const std::string t = strip(text);
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(t, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != t.size() || t.empty()) {
        throw std::runtime_error(path + ": malformed row " + std::to_string(row) + ": '" + text + "'");
    }
    return value;
}

[[nodiscard]] inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open file (missing or unreadable)");
    return in;
}

[[nodiscard]] inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open file for writing");
    return out;
}

}  // namespace detail

/// Counts CSV: header `t,count`, one row per observation time with the
/// count of the interval ending there. The origin t_0 = 0 is implicit
/// unless the first row leaves the count blank to declare a nonzero
/// origin.
[[nodiscard]] inline CountData load_counts(const std::string& path) {
    std::ifstream in = detail::open_input(path);
    std::string line;
    std::size_t row = 0;
    std::vector<double> times;
    std::vector<int> counts;
    bool saw_first_data_row = false;
    while (std::getline(in, line)) {
        ++row;
        const std::string stripped = detail::strip(line);
        if (stripped.empty()) continue;
        if (row == 1 && stripped == "t,count") continue;
        const auto fields = detail::split_csv(stripped);
        if (fields.size() != 2) {
            throw std::runtime_error(path + ": malformed row " + std::to_string(row) +
                                     ": expected 't,count'");
        }
        const double t = detail::parse_double(fields[0], path, row);
        if (!saw_first_data_row) {
            saw_first_data_row = true;
            if (detail::strip(fields[1]).empty()) {
                times.push_back(t);  // declared origin
                continue;
            }
            times.push_back(0.0);
        }
        const double count_value = detail::parse_double(fields[1], path, row);
        const int count = static_cast<int>(count_value);
        if (count_value != static_cast<double>(count)) {
            throw std::runtime_error(path + ": malformed row " + std::to_string(row) +
                                     ": count must be an integer");
        }
        if (count < 0) {
            throw std::runtime_error(path + ": negative count at row " + std::to_string(row));
        }
        if (!(t > times.back())) {
            throw std::runtime_error(path + ": non-increasing times at row " + std::to_string(row));
        }
        times.push_back(t);
        counts.push_back(count);
    }
    if (counts.empty()) throw std::runtime_error(path + ": no count rows found");
    return CountData(std::move(times), std::move(counts));
}

inline void save_counts(const CountData& data, const std::string& path) {
    std::ofstream out = detail::open_output(path);
    out << "t,count\n";
    if (data.origin() != 0.0) out << detail::fmt17(data.origin()) << ",\n";
    for (int i = 0; i < data.num_intervals(); ++i) {
        out << detail::fmt17(data.times[static_cast<std::size_t>(i) + 1]) << ','
            << data.counts[static_cast<std::size_t>(i)] << '\n';
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

/// Events CSV: single `tau` column.
inline void save_events(const EventHistory& history, const std::string& path) {
    std::ofstream out = detail::open_output(path);
    out << "tau\n";
    for (double t : history.times) out << detail::fmt17(t) << '\n';
    if (!out) throw std::runtime_error(path + ": write failed");
}

[[nodiscard]] inline std::vector<double> load_events(const std::string& path) {
    std::ifstream in = detail::open_input(path);
    std::string line;
    std::size_t row = 0;
    std::vector<double> times;
    while (std::getline(in, line)) {
        ++row;
        const std::string stripped = detail::strip(line);
        if (stripped.empty()) continue;
        if (row == 1 && stripped == "tau") continue;
        times.push_back(detail::parse_double(stripped, path, row));
    }
    return times;
}

/// Chain CSV: `iter,nu,eta[,alpha],beta,loglik,accepted`. The loglik
/// column repeats the cached value across rejected iterations.
inline void save_chain(const ChainOutput& output, const std::string& path) {
    std::ofstream out = detail::open_output(path);
    out << "iter";
    for (const std::string& name : parameter_names(output.family)) out << ',' << name;
    out << ",loglik,accepted\n";
    for (const ChainRecord& r : output.records) {
        out << r.iteration;
        for (double v : r.natural) out << ',' << detail::fmt17(v);
        out << ',' << detail::fmt17(r.loglik) << ',' << (r.accepted ? 1 : 0) << '\n';
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

[[nodiscard]] inline ChainOutput load_chain(const std::string& path) {
    std::ifstream in = detail::open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty chain file");
    const auto header = detail::split_csv(detail::strip(line));
    KernelFamily family = KernelFamily::exponential;
    if (header.size() == 7 && header[3] == "alpha") {
        family = KernelFamily::gamma;  // alpha column present; names are what matter
    } else if (header.size() != 6) {
        throw std::runtime_error(path + ": malformed row 1: unrecognized chain header");
    }
    const std::size_t dim = header.size() - 3;

    ChainOutput output;
    output.family = family;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        const std::string stripped = detail::strip(line);
        if (stripped.empty()) continue;
        const auto fields = detail::split_csv(stripped);
        if (fields.size() != dim + 3) {
            throw std::runtime_error(path + ": malformed row " + std::to_string(row));
        }
        ChainRecord r;
        r.iteration = static_cast<int>(detail::parse_double(fields[0], path, row));
        r.natural.reserve(dim);
        for (std::size_t k = 0; k < dim; ++k) {
            r.natural.push_back(detail::parse_double(fields[1 + k], path, row));
        }
        r.loglik = detail::parse_double(fields[dim + 1], path, row);
        r.accepted = detail::parse_double(fields[dim + 2], path, row) != 0.0;
        r.log_accept_ratio = 0.0;
        try {
            const HawkesParams p(r.natural[0],
                                 ExcitationKernel::make(family, r.natural[1],
                                                        dim == 4 ? r.natural[2] : 1.0,
                                                        r.natural[dim - 1]));
            r.transformed = to_transformed(p);
        } catch (const std::invalid_argument& err) {
            throw std::runtime_error(path + ": row " + std::to_string(row) +
                                     " holds invalid parameters: " + err.what());
        }
        output.records.push_back(std::move(r));
    }
    if (output.records.empty()) throw std::runtime_error(path + ": chain file has no records");
    return output;
}

/// Summary as a flat key=value record.
inline void save_summary(const Summary& summary, const std::string& path) {
    std::ofstream out = detail::open_output(path);
    out << "acceptance_rate=" << detail::fmt17(summary.acceptance_rate) << '\n';
    for (const ParameterSummary& p : summary.parameters) {
        out << p.name << ".est=" << detail::fmt17(p.estimate) << '\n'
            << p.name << ".lower=" << detail::fmt17(p.lower) << '\n'
            << p.name << ".upper=" << detail::fmt17(p.upper) << '\n'
            << p.name << ".se=" << detail::fmt17(p.se) << '\n';
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace hawkes
