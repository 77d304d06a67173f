#include "funcito/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace funcito {

std::string format_float(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_path_csv(std::ostream& os, const Path& x) {
    os << "t";
    for (std::size_t i = 1; i <= x.dim(); ++i) os << ",x_" << i;
    os << "\n";
    for (std::size_t k = 0; k < x.n_nodes(); ++k) {
        os << format_float(x.grid().node(k));
        for (double v : x.node(k)) os << "," << format_float(v);
        os << "\n";
    }
}

std::string path_to_csv(const Path& x) {
    std::ostringstream os;
    write_path_csv(os, x);
    return os.str();
}

void write_ensemble_csv(std::ostream& os, const std::vector<Path>& trajectories) {
    if (trajectories.empty()) return;
    const std::size_t dim = trajectories.front().dim();
    os << "trajectory_id,t";
    for (std::size_t i = 1; i <= dim; ++i) os << ",x_" << i;
    os << "\n";
    for (std::size_t id = 0; id < trajectories.size(); ++id) {
        const Path& x = trajectories[id];
        for (std::size_t k = 0; k < x.n_nodes(); ++k) {
            os << id << "," << format_float(x.grid().node(k));
            for (double v : x.node(k)) os << "," << format_float(v);
            os << "\n";
        }
    }
}

void write_ensemble_summary_csv(std::ostream& os, const std::vector<Path>& trajectories) {
    if (trajectories.empty()) return;
    const std::size_t dim = trajectories.front().dim();
    const std::size_t nodes = trajectories.front().n_nodes();
    const double n = static_cast<double>(trajectories.size());
    os << "t";
    for (std::size_t i = 1; i <= dim; ++i) os << ",mean_" << i;
    for (std::size_t i = 1; i <= dim; ++i) os << ",var_" << i;
    for (std::size_t i = 1; i <= dim; ++i) os << ",stderr_" << i;
    os << "\n";
    for (std::size_t k = 0; k < nodes; ++k) {
        Vec mean(dim, 0.0), var(dim, 0.0);
        for (const Path& x : trajectories)
            for (std::size_t i = 0; i < dim; ++i) mean[i] += x.node(k)[i];
        for (std::size_t i = 0; i < dim; ++i) mean[i] /= n;
        for (const Path& x : trajectories)
            for (std::size_t i = 0; i < dim; ++i) {
                const double d = x.node(k)[i] - mean[i];
                var[i] += d * d;
            }
        for (std::size_t i = 0; i < dim; ++i) var[i] = n > 1 ? var[i] / (n - 1.0) : 0.0;
        os << format_float(trajectories.front().grid().node(k));
        for (std::size_t i = 0; i < dim; ++i) os << "," << format_float(mean[i]);
        for (std::size_t i = 0; i < dim; ++i) os << "," << format_float(var[i]);
        for (std::size_t i = 0; i < dim; ++i) os << "," << format_float(std::sqrt(var[i] / n));
        os << "\n";
    }
}

void write_text_file(const std::string& file_path, const std::string& content) {
    std::ofstream out(file_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + file_path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + file_path);
}

}  // namespace funcito
