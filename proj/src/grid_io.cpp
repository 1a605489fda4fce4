#include "oplab/grid_io.hpp"

#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace oplab {

std::string grid_to_csv(const GridFunction& u) {
    const Domain& d = u.domain;
    std::ostringstream os;
    os << "nx,ny,hx,hy,ox,oy\n";
    os << d.nx() << ',' << d.ny() << ',' << format_g17(d.h(0)) << ',' << format_g17(d.h(1))
       << ',' << format_g17(d.origin[0]) << ',' << format_g17(d.origin[1]) << '\n';
    for (int iy = 0; iy < d.ny(); ++iy) {
        for (int ix = 0; ix < d.nx(); ++ix) {
            if (ix) os << ',';
            os << format_g17(u.at(ix, iy));
        }
        os << '\n';
    }
    return os.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

GridFunction grid_from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("csv: empty input");
    if (!std::getline(is, line)) throw std::invalid_argument("csv: missing geometry line");
    const auto geo = split_csv_line(line);
    if (geo.size() != 6) throw std::invalid_argument("csv: geometry line needs 6 fields");

    Domain d;
    d.n = {std::stoi(geo[0]), std::stoi(geo[1])};
    const double hx = std::stod(geo[2]), hy = std::stod(geo[3]);
    d.origin = {std::stod(geo[4]), std::stod(geo[5])};
    d.extent = {hx * (d.n[0] - 1), hy * (d.n[1] - 1)};
    d.validate();

    GridFunction u = GridFunction::zeros(d);
    for (int iy = 0; iy < d.ny(); ++iy) {
        if (!std::getline(is, line)) throw std::invalid_argument("csv: truncated values");
        const auto row = split_csv_line(line);
        if (int(row.size()) != d.nx()) throw std::invalid_argument("csv: row width mismatch");
        for (int ix = 0; ix < d.nx(); ++ix) u.at(ix, iy) = std::stod(row[ix]);
    }
    if (!u.all_finite()) throw std::invalid_argument("csv: non-finite value");
    return u;
}

std::string grid_to_json(const GridFunction& u) {
    const Domain& d = u.domain;
    std::ostringstream os;
    os << "{\"domain\":{\"origin\":[" << format_g17(d.origin[0]) << ',' << format_g17(d.origin[1])
       << "],\"extent\":[" << format_g17(d.extent[0]) << ',' << format_g17(d.extent[1])
       << "],\"n\":[" << d.nx() << ',' << d.ny() << "]},\"values\":[";
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        if (i) os << ',';
        os << format_g17(u.values[i]);
    }
    os << "]}";
    return os.str();
}

GridFunction grid_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    Domain d;
    d.origin = {j.at("domain").at("origin").at(0).get<double>(),
                j.at("domain").at("origin").at(1).get<double>()};
    d.extent = {j.at("domain").at("extent").at(0).get<double>(),
                j.at("domain").at("extent").at(1).get<double>()};
    d.n = {j.at("domain").at("n").at(0).get<int>(), j.at("domain").at("n").at(1).get<int>()};
    d.validate();
    const auto& vals = j.at("values");
    if (int(vals.size()) != d.num_nodes())
        throw std::invalid_argument("json: values length mismatch");
    GridFunction u = GridFunction::zeros(d);
    for (std::size_t i = 0; i < vals.size(); ++i) u.values[i] = vals[i].get<double>();
    if (!u.all_finite()) throw std::invalid_argument("json: non-finite value");
    return u;
}

} // namespace oplab
