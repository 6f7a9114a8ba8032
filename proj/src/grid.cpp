#include "kpsh/grid.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace kpsh {

std::int64_t GridDomain::size() const {
    std::int64_t s = 1;
    for (int v : shape) s *= v;
    return s;
}

void GridDomain::validate() const {
    require(n >= 1, "GridDomain: n must be positive");
    require(static_cast<int>(shape.size()) == 2 * n &&
                static_cast<int>(spacing.size()) == 2 * n &&
                static_cast<int>(origin.size()) == 2 * n,
            "GridDomain: shape/spacing/origin must have 2n entries");
    for (int s : shape) require(s >= 1, "GridDomain: empty axis");
    for (double h : spacing) require(h > 0.0, "GridDomain: spacing must be positive");
}

std::int64_t GridDomain::flat(const std::vector<int>& idx) const {
    std::int64_t f = 0;
    for (int a = 0; a < axes(); ++a) f = f * shape[a] + idx[a];
    return f;
}

std::vector<int> GridDomain::unflat(std::int64_t f) const {
    std::vector<int> idx(axes());
    for (int a = axes() - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(f % shape[a]);
        f /= shape[a];
    }
    return idx;
}

std::vector<double> GridDomain::point(const std::vector<int>& idx) const {
    std::vector<double> x(axes());
    for (int a = 0; a < axes(); ++a) x[a] = origin[a] + spacing[a] * idx[a];
    return x;
}

std::int64_t GridDomain::neighbour(const std::vector<int>& idx, int axis, int step) const {
    int v = idx[axis] + step;
    if (topology == Topology::torus) {
        v %= shape[axis];
        if (v < 0) v += shape[axis];
    } else if (v < 0 || v >= shape[axis]) {
        return -1;
    }
    std::int64_t f = 0;
    for (int a = 0; a < axes(); ++a) f = f * shape[a] + (a == axis ? v : idx[a]);
    return f;
}

void ScalarField::validate() const {
    domain.validate();
    require(static_cast<std::int64_t>(values.size()) == domain.size(),
            "ScalarField: value count does not match grid");
    require(mask.empty() || mask.size() == values.size(),
            "ScalarField: mask size mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
        if (masked_in(static_cast<std::int64_t>(i)))
            require(std::isfinite(values[i]), "ScalarField: non-finite value on mask");
}

ScalarField ScalarField::sample(const GridDomain& d,
                                const std::function<double(const std::vector<double>&)>& f) {
    d.validate();
    ScalarField out;
    out.domain = d;
    out.values.resize(d.size());
    std::vector<int> idx(d.axes(), 0);
    for (std::int64_t fl = 0; fl < d.size(); ++fl) {
        out.values[fl] = f(d.point(idx));
        for (int a = d.axes() - 1; a >= 0; --a) {
            if (++idx[a] < d.shape[a]) break;
            idx[a] = 0;
        }
    }
    return out;
}

void for_each_interior(const GridDomain& d, int margin,
                       const std::function<void(const std::vector<int>&, std::int64_t)>& fn) {
    const int lo_pad = (d.topology == GridDomain::Topology::torus) ? 0 : margin;
    std::vector<int> lo(d.axes(), lo_pad), hi(d.axes());
    for (int a = 0; a < d.axes(); ++a) {
        hi[a] = d.shape[a] - 1 - lo_pad;
        require(hi[a] >= lo[a], "for_each_interior: domain too small for stencil");
    }
    std::vector<int> idx(lo);
    while (true) {
        fn(idx, d.flat(idx));
        int a = d.axes() - 1;
        while (a >= 0) {
            if (++idx[a] <= hi[a]) break;
            idx[a] = lo[a];
            --a;
        }
        if (a < 0) break;
    }
}

namespace {

std::string header_line(const GridDomain& d) {
    std::ostringstream os;
    os << d.n;
    for (int s : d.shape) os << ", " << s;
    for (double h : d.spacing) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", h);
        os << ", " << buf;
    }
    for (double o : d.origin) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", o);
        os << ", " << buf;
    }
    os << ", " << (d.topology == GridDomain::Topology::torus ? "torus" : "box");
    return os.str();
}

GridDomain parse_header(const std::string& line) {
    std::vector<std::string> parts;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t b = tok.find_first_not_of(" \t");
        std::size_t e = tok.find_last_not_of(" \t\r");
        parts.push_back(b == std::string::npos ? "" : tok.substr(b, e - b + 1));
    }
    require(parts.size() >= 2, "field file: malformed header");
    GridDomain d;
    d.n = std::stoi(parts[0]);
    require(static_cast<int>(parts.size()) == 2 + 6 * d.n,
            "field file: header field count mismatch");
    for (int a = 0; a < 2 * d.n; ++a) d.shape.push_back(std::stoi(parts[1 + a]));
    for (int a = 0; a < 2 * d.n; ++a) d.spacing.push_back(std::stod(parts[1 + 2 * d.n + a]));
    for (int a = 0; a < 2 * d.n; ++a) d.origin.push_back(std::stod(parts[1 + 4 * d.n + a]));
    const std::string& topo = parts.back();
    require(topo == "box" || topo == "torus", "field file: unknown topology");
    d.topology = topo == "torus" ? GridDomain::Topology::torus : GridDomain::Topology::box;
    d.validate();
    return d;
}

bool has_suffix(const std::string& s, const std::string& suf) {
    return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

} // namespace

void write_field(const ScalarField& f, const std::string& path) {
    f.validate();
    if (has_suffix(path, ".csv")) {
        std::ofstream os(path);
        require(os.good(), "write_field: cannot open " + path);
        os << header_line(f.domain) << "\n";
        char buf[40];
        for (double v : f.values) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            os << buf << "\n";
        }
    } else {
        std::ofstream os(path, std::ios::binary);
        require(os.good(), "write_field: cannot open " + path);
        os << header_line(f.domain) << "\n";
        os.write(reinterpret_cast<const char*>(f.values.data()),
                 static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    }
}

ScalarField read_field(const std::string& path) {
    ScalarField f;
    if (has_suffix(path, ".csv")) {
        std::ifstream is(path);
        require(is.good(), "read_field: cannot open " + path);
        std::string line;
        require(static_cast<bool>(std::getline(is, line)), "read_field: empty file");
        f.domain = parse_header(line);
        f.values.reserve(f.domain.size());
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            f.values.push_back(std::stod(line));
        }
    } else {
        std::ifstream is(path, std::ios::binary);
        require(is.good(), "read_field: cannot open " + path);
        std::string line;
        require(static_cast<bool>(std::getline(is, line)), "read_field: empty file");
        f.domain = parse_header(line);
        f.values.resize(f.domain.size());
        is.read(reinterpret_cast<char*>(f.values.data()),
                static_cast<std::streamsize>(f.values.size() * sizeof(double)));
        require(is.gcount() ==
                    static_cast<std::streamsize>(f.values.size() * sizeof(double)),
                "read_field: truncated data");
    }
    f.validate();
    return f;
}

} // namespace kpsh
