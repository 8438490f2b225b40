#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "faultscout/classifier.hpp"
#include "faultscout/geometry.hpp"
#include "faultscout/region.hpp"

namespace faultscout {

namespace io {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string fault_filename(FaultKey key) {
  return "fault_" + std::to_string(key.first) + "_" + std::to_string(key.second) + ".csv";
}

/// One CSV per interface: component and sequence number, then the class_i
/// point, the class_j point and the midpoint, full precision.
template <int Dim>
void write_triplet_csv(std::ostream& out, const FaultSet<Dim>& fs) {
  out << "fault_i,fault_j,component,seq,";
  for (int d = 1; d <= Dim; ++d) out << "xi_" << d << ",";
  for (int d = 1; d <= Dim; ++d) out << "xj_" << d << ",";
  for (int d = 1; d <= Dim; ++d) out << "xm_" << d << (d == Dim ? "" : ",");
  out << "\n";
  for (std::size_t c = 0; c < fs.component_count(); ++c) {
    std::size_t seq = 0;
    for (std::size_t k = fs.component_begin(c); k < fs.component_end(c); ++k, ++seq) {
      const auto& t = fs.triplets[k];
      out << fs.class_i << "," << fs.class_j << "," << c << "," << seq << ",";
      const Vec<Dim> mid = t.mid();
      for (int d = 0; d < Dim; ++d) out << format_double(t.point_i[d]) << ",";
      for (int d = 0; d < Dim; ++d) out << format_double(t.point_j[d]) << ",";
      for (int d = 0; d < Dim; ++d)
        out << format_double(mid[d]) << (d + 1 == Dim ? "" : ",");
      out << "\n";
    }
  }
}

template <int Dim>
void write_triplet_csv(const std::string& path, const FaultSet<Dim>& fs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_triplet_csv(out, fs);
}

template <int Dim>
FaultSet<Dim> read_triplet_csv(std::istream& in) {
  FaultSet<Dim> fs;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("triplet csv: empty file");
  long current_component = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 4 + 3 * Dim) throw std::runtime_error("triplet csv: bad row");
    Triplet<Dim> t;
    t.class_i = std::stoi(cells[0]);
    t.class_j = std::stoi(cells[1]);
    const long comp = std::stol(cells[2]);
    for (int d = 0; d < Dim; ++d) t.point_i[d] = std::stod(cells[4 + d]);
    for (int d = 0; d < Dim; ++d) t.point_j[d] = std::stod(cells[4 + Dim + d]);
    if (comp != current_component && !fs.triplets.empty())
      fs.component_breaks.push_back(fs.triplets.size());
    current_component = comp;
    fs.class_i = t.class_i;
    fs.class_j = t.class_j;
    fs.triplets.push_back(t);
  }
  fs.sorted = true;
  fs.component_closed.assign(fs.component_count(), false);
  return fs;
}

template <int Dim>
FaultSet<Dim> read_triplet_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  return read_triplet_csv<Dim>(in);
}

/// Evaluation report, one line per building block.
inline std::string ledger_report(const EvalLedger& ledger) {
  std::ostringstream out;
  out << "building block  evaluations\n";
  for (int p = 0; p < kPhaseCount; ++p) {
    out << std::left << std::setw(16) << phase_name(static_cast<Phase>(p))
        << ledger.counts[p] << "\n";
  }
  out << std::left << std::setw(16) << "total" << ledger.total() << "\n";
  return out.str();
}

/// ASCII point cloud of the midpoints with interface and provenance tags.
inline void write_ply(std::ostream& out, const FaultSet<3>& fs) {
  out << "ply\nformat ascii 1.0\n";
  out << "element vertex " << fs.triplets.size() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  out << "property int fault_i\nproperty int fault_j\nproperty int phase\n";
  out << "end_header\n";
  for (const auto& t : fs.triplets) {
    const Vec3 m = t.mid();
    out << format_double(m[0]) << " " << format_double(m[1]) << " " << format_double(m[2])
        << " " << fs.class_i << " " << fs.class_j << " " << static_cast<int>(t.origin) << "\n";
  }
}

inline void write_ply(const std::string& path, const FaultSet<3>& fs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_ply(out, fs);
}

inline const char* fault_color(std::size_t ordinal) {
  static const char* palette[] = {"#c0392b", "#2980b9", "#27ae60", "#8e44ad",
                                  "#d35400", "#16a085", "#7f8c8d", "#2c3e50"};
  return palette[ordinal % 8];
}

/// Deterministic SVG overlay: one polyline (or polygon when closed) per
/// component, midpoints as dots, colored per interface. 3D sets are drawn in
/// orthographic projection onto the xy plane.
template <int Dim>
std::string render_svg(const FaultMap<Dim>& faults, const BoxDomain<Dim>& box) {
  const double w = box.upper[0] - box.lower[0];
  const double hgt = box.upper[1] - box.lower[1];
  const double size = 720.0;
  const double sx = size / w, sy = size * (hgt / w) / hgt;
  const double canvas_h = size * hgt / w;

  auto px = [&](double x) { return (x - box.lower[0]) * sx; };
  auto py = [&](double y) { return canvas_h - (y - box.lower[1]) * sy; };
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return std::string(buf);
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << fmt(size) << " "
      << fmt(canvas_h) << "\">\n";
  if (faults.empty()) out << "<!-- warning: empty reconstruction -->\n";
  out << "<rect width=\"" << fmt(size) << "\" height=\"" << fmt(canvas_h)
      << "\" fill=\"white\"/>\n";

  std::size_t ordinal = 0;
  for (const auto& [key, fs] : faults) {
    const char* color = fault_color(ordinal++);
    out << "<g stroke=\"" << color << "\" fill=\"none\" stroke-width=\"1.5\">\n";
    for (std::size_t c = 0; c < fs.component_count(); ++c) {
      const char* tag = fs.closed(c) ? "polygon" : "polyline";
      out << "<" << tag << " points=\"";
      for (std::size_t k = fs.component_begin(c); k < fs.component_end(c); ++k) {
        const auto m = fs.triplets[k].mid();
        if (k != fs.component_begin(c)) out << " ";
        out << fmt(px(m[0])) << "," << fmt(py(m[1]));
      }
      out << "\"/>\n";
    }
    out << "</g>\n<g fill=\"" << color << "\">\n";
    for (const auto& t : fs.triplets) {
      const auto m = t.mid();
      out << "<circle cx=\"" << fmt(px(m[0])) << "\" cy=\"" << fmt(py(m[1]))
          << "\" r=\"2\"/>\n";
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

/// Flat key = value store used for the manifest.
class KeyValueFile {
 public:
  void set(const std::string& key, const std::string& value) { entries_[key] = value; }
  void set(const std::string& key, double value) { entries_[key] = format_double(value); }
  void set(const std::string& key, int value) { entries_[key] = std::to_string(value); }
  void set(const std::string& key, std::size_t value) { entries_[key] = std::to_string(value); }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  const std::string& get(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw std::runtime_error("missing key: " + key);
    return it->second;
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const auto& [k, v] : entries_) out << k << " = " << v << "\n";
  }

  static KeyValueFile load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    KeyValueFile kv;
    std::string line;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      auto trim = [](std::string s) {
        s.erase(0, s.find_first_not_of(" \t\r"));
        s.erase(s.find_last_not_of(" \t\r") + 1);
        return s;
      };
      kv.entries_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
  }

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace io

}  // namespace faultscout
