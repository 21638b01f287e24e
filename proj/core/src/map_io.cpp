#include "sphererig/map_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "sphererig/errors.hpp"

namespace sphererig {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& token, std::size_t line) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw InvalidArgument("map file line " + std::to_string(line) + ": bad number '" +
                          token + "'");
  }
  return v;
}

int header_int(const std::string& header, const std::string& key) {
  const auto pos = header.find(key + "=");
  if (pos == std::string::npos) throw InvalidArgument("map header missing " + key);
  return std::stoi(header.substr(pos + key.size() + 1));
}

}  // namespace

void write_map(std::ostream& os, const SphereMap& u) {
  const SphereGrid& g = *u.grid();
  os << "#spheremap v1 n_theta=" << g.n_theta() << " n_phi=" << g.n_phi() << '\n';
  for (int i = 0; i < g.n_theta(); ++i) {
    for (int j = 0; j < g.n_phi(); ++j) {
      const Vec3& v = u.values()[static_cast<std::size_t>(i) * g.n_phi() + j];
      os << format_double(g.theta(i)) << ' ' << format_double(g.phi(j)) << ' '
         << format_double(v[0]) << ' ' << format_double(v[1]) << ' '
         << format_double(v[2]) << '\n';
    }
  }
}

SphereMap read_map(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("#spheremap v1", 0) != 0) {
    throw InvalidArgument("not a '#spheremap v1' file");
  }
  const int n_theta = header_int(header, "n_theta");
  const int n_phi = header_int(header, "n_phi");
  auto grid = SphereGrid::build(n_theta, n_phi);

  std::vector<Vec3> values(grid->size());
  std::string line;
  std::size_t lineno = 1;
  for (int i = 0; i < n_theta; ++i) {
    for (int j = 0; j < n_phi; ++j) {
      ++lineno;
      if (!std::getline(is, line)) {
        throw InvalidArgument("map file truncated at line " + std::to_string(lineno));
      }
      std::istringstream ls(line);
      std::string tok[5];
      for (auto& t : tok) {
        if (!(ls >> t)) {
          throw InvalidArgument("map file line " + std::to_string(lineno) +
                                ": expected 5 columns");
        }
      }
      const double theta = parse_double(tok[0], lineno);
      const double phi = parse_double(tok[1], lineno);
      if (std::abs(theta - grid->theta(i)) > 1e-12 || std::abs(phi - grid->phi(j)) > 1e-12) {
        throw InvalidArgument("map file line " + std::to_string(lineno) +
                              ": node coordinates do not match the grid");
      }
      values[static_cast<std::size_t>(i) * n_phi + j] =
          Vec3(parse_double(tok[2], lineno), parse_double(tok[3], lineno),
               parse_double(tok[4], lineno));
    }
  }
  return SphereMap(grid, std::move(values));
}

void write_map_file(const std::string& path, const SphereMap& u) {
  std::ofstream os(path);
  if (!os) throw InvalidArgument("cannot open '" + path + "' for writing");
  write_map(os, u);
  if (!os) throw InvalidArgument("write to '" + path + "' failed");
}

SphereMap read_map_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidArgument("cannot open '" + path + "'");
  return read_map(is);
}

}  // namespace sphererig
