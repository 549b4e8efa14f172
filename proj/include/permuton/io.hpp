#ifndef PERMUTON_IO_HPP
#define PERMUTON_IO_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "core.hpp"
#include "curves.hpp"
#include "entropy.hpp"
#include "insertion.hpp"
#include "patterns.hpp"

namespace permuton {

/// Round-trip text for a double: 17 significant digits.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, sep)) {
        out.push_back(item);
    }
    return out;
}

inline double parse_double(const std::string& s, const std::string& where) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ValidationError(where + ": '" + s + "' is not a number");
    }
    while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) {
        ++used;
    }
    require(used == s.size(), where + ": trailing characters in '" + s + "'");
    return v;
}

inline std::size_t parse_header_int(const std::string& field, const std::string& key) {
    const std::string prefix = key + "=";
    require(field.rfind(prefix, 0) == 0, "expected '" + prefix + "<int>' header, got '" + field + "'");
    const double v = parse_double(field.substr(prefix.size()), "header " + key);
    require(v >= 1.0 && v == std::floor(v) && v < 1e7, "header " + key + " must be a positive integer");
    return static_cast<std::size_t>(v);
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), "cannot open '" + path + "' for writing");
    return out;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "cannot open '" + path + "' for reading");
    return in;
}

}

// ---------------------------------------------------------------------------
// grid CSV: "m=<int>", then row i (x-cell i) holds the m masses of column j (y-cell j)
// ---------------------------------------------------------------------------

inline void write_grid_csv(std::ostream& out, const GridPermuton& g) {
    const std::size_t m = g.m();
    out << "m=" << m << '\n';
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            out << (j ? "," : "") << format_double(g(i, j));
        }
        out << '\n';
    }
}

inline GridPermuton read_grid_csv(std::istream& in) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "grid CSV: empty input");
    const std::size_t m = detail::parse_header_int(line, "m");
    std::vector<double> w;
    w.reserve(m * m);
    for (std::size_t i = 0; i < m; ++i) {
        require(static_cast<bool>(std::getline(in, line)), "grid CSV: expected " + std::to_string(m) + " rows");
        const auto fields = detail::split(line, ',');
        require(fields.size() == m, "grid CSV: row " + std::to_string(i + 1) + " has " + std::to_string(fields.size()) +
                                        " values, expected " + std::to_string(m));
        for (const std::string& f : fields) {
            w.push_back(detail::parse_double(f, "grid CSV row " + std::to_string(i + 1)));
        }
    }
    while (std::getline(in, line)) {
        require(line.find_first_not_of(" \t\r") == std::string::npos, "grid CSV: unexpected data after row " +
                                                                           std::to_string(m));
    }
    // tolerate text rounding of third-party files; our own output round-trips exactly
    return GridPermuton(m, std::move(w), 1e-9);
}

inline void save_grid(const std::string& path, const GridPermuton& g) {
    std::ofstream out = detail::open_out(path);
    write_grid_csv(out, g);
}

inline GridPermuton load_grid(const std::string& path) {
    std::ifstream in = detail::open_in(path);
    return read_grid_csv(in);
}

/// All classical patterns of length 2 and 3 with their exact grid densities.
inline nlohmann::ordered_json grid_densities_json(const GridPermuton& g) {
    nlohmann::ordered_json d = nlohmann::ordered_json::object();
    for (const char* p : {"12", "21", "123", "132", "213", "231", "312", "321"}) {
        d[p] = density_grid_exact(g, PatternSpec::parse(p));
    }
    return d;
}

inline nlohmann::ordered_json grid_meta_json(const GridPermuton& g) {
    nlohmann::ordered_json j;
    j["m"] = g.m();
    j["entropy"] = entropy_grid(g);
    j["densities"] = grid_densities_json(g);
    return j;
}

/// "<dir>/<stem>.csv" -> "<dir>/<stem>.meta.json"
inline std::string sidecar_path(const std::string& csv_path) {
    const std::size_t slash = csv_path.find_last_of('/');
    const std::size_t dot = csv_path.find_last_of('.');
    const std::string stem = (dot != std::string::npos && (slash == std::string::npos || dot > slash))
                                 ? csv_path.substr(0, dot)
                                 : csv_path;
    return stem + ".meta.json";
}

/// Writes the grid CSV and its metadata sidecar.
inline void save_grid_with_meta(const std::string& path, const GridPermuton& g) {
    save_grid(path, g);
    std::ofstream meta = detail::open_out(sidecar_path(path));
    meta << grid_meta_json(g).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// insertion family CSV: "mt=<int>,my=<int>", then 1-based (x_index, y_index, f) column by column
// ---------------------------------------------------------------------------

inline void write_insertion_csv(std::ostream& out, const InsertionFamily& fam) {
    out << "mt=" << fam.mt() << ",my=" << fam.my() << '\n';
    for (std::size_t c = 0; c < fam.mt(); ++c) {
        for (std::size_t k = 0; k < fam.rows(c); ++k) {
            out << c + 1 << ',' << k + 1 << ',' << format_double(fam(c, k)) << '\n';
        }
    }
}

inline InsertionFamily read_insertion_csv(std::istream& in) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "insertion CSV: empty input");
    const auto head = detail::split(line, ',');
    require(head.size() == 2, "insertion CSV: header must be 'mt=<int>,my=<int>'");
    const std::size_t mt = detail::parse_header_int(head[0], "mt");
    const std::size_t my = detail::parse_header_int(head[1], "my");
    std::vector<std::vector<double>> cols(mt);
    for (std::size_t c = 0; c < mt; ++c) {
        cols[c].assign(InsertionFamily::rows_for(mt, my, c), std::nan(""));
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const auto f = detail::split(line, ',');
        const std::string where = "insertion CSV line " + std::to_string(lineno);
        require(f.size() == 3, where + ": expected x_index,y_index,f");
        const double xi = detail::parse_double(f[0], where);
        const double yi = detail::parse_double(f[1], where);
        require(xi >= 1.0 && xi <= static_cast<double>(mt) && xi == std::floor(xi), where + ": x_index out of range");
        const auto c = static_cast<std::size_t>(xi) - 1;
        require(yi >= 1.0 && yi <= static_cast<double>(cols[c].size()) && yi == std::floor(yi),
                where + ": y_index out of range");
        cols[c][static_cast<std::size_t>(yi) - 1] = detail::parse_double(f[2], where);
    }
    for (std::size_t c = 0; c < mt; ++c) {
        for (double v : cols[c]) {
            require(!std::isnan(v), "insertion CSV: column " + std::to_string(c + 1) + " is incomplete");
        }
    }
    return InsertionFamily(mt, my, std::move(cols));
}

inline void save_insertion(const std::string& path, const InsertionFamily& fam) {
    std::ofstream out = detail::open_out(path);
    write_insertion_csv(out, fam);
}

inline InsertionFamily load_insertion(const std::string& path) {
    std::ifstream in = detail::open_in(path);
    return read_insertion_csv(in);
}

// ---------------------------------------------------------------------------
// curves and heatmaps
// ---------------------------------------------------------------------------

/// label,t,x,y rows.
inline void write_curves_csv(std::ostream& out, const std::vector<RegionCurve>& curves) {
    out << "label,t,x,y\n";
    for (const RegionCurve& c : curves) {
        for (const CurvePoint& p : c.points) {
            out << c.label << ',' << format_double(p.t) << ',' << format_double(p.x) << ',' << format_double(p.y)
                << '\n';
        }
    }
}

/// Binary 8-bit PGM of the cell masses, scaled so the largest cell is 255; y grows upward.
inline void write_pgm(std::ostream& out, const GridPermuton& g) {
    const std::size_t m = g.m();
    const auto w = g.masses();
    const double top = *std::max_element(w.begin(), w.end());
    out << "P5\n" << m << ' ' << m << "\n255\n";
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t j = m - 1 - r;
        for (std::size_t i = 0; i < m; ++i) {
            const double v = top > 0.0 ? g(i, j) / top : 0.0;
            out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)))));
        }
    }
}

inline void save_pgm(const std::string& path, const GridPermuton& g) {
    std::ofstream out = detail::open_out(path);
    write_pgm(out, g);
}

}

#endif
