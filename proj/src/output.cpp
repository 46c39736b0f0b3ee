#include "nscheps/output.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "nscheps/error.hpp"

namespace nscheps {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

namespace {

constexpr char magic[4] = {'E', 'P', 'S', 'F'};
constexpr std::size_t header_size = 4 + 4 + 4 + 4 + 8;

template <class T>
void put(std::vector<unsigned char>& out, T value) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.insert(out.end(), buf, buf + sizeof(T));
}

void put_array(std::vector<unsigned char>& out, const std::vector<double>& values) {
  const auto* p = reinterpret_cast<const unsigned char*>(values.data());
  out.insert(out.end(), p, p + values.size() * sizeof(double));
}

class Cursor {
 public:
  explicit Cursor(const std::vector<unsigned char>& bytes) : bytes_(bytes) {}

  template <class T>
  T get(const char* what) {
    need(sizeof(T), what);
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::vector<double> array(std::size_t n, const char* what) {
    need(n * sizeof(double), what);
    std::vector<double> out(n);
    std::memcpy(out.data(), bytes_.data() + pos_, n * sizeof(double));
    pos_ += n * sizeof(double);
    return out;
  }

  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      std::ostringstream os;
      os << "snapshot truncated at offset " << pos_ << " while reading " << what << " (" << n << " bytes needed, "
         << bytes_.size() - pos_ << " available)";
      throw Error(ErrorKind::format, os.str());
    }
  }

  const std::vector<unsigned char>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::size_t snapshot_size(std::uint32_t nx, std::uint32_t ny) {
  const std::size_t cells = static_cast<std::size_t>(nx) * ny;
  const std::size_t faces = static_cast<std::size_t>(nx + 1) * ny + static_cast<std::size_t>(nx) * (ny + 1);
  return header_size + sizeof(double) * (3 * cells + faces);
}

std::vector<unsigned char> encode_snapshot(const SimState& state) {
  const GridSpec& g = state.phi.grid;
  require_same_grid(g, state.mu.grid, "encode_snapshot");
  require_same_grid(g, state.p.grid, "encode_snapshot");
  require_same_grid(g, state.v.grid, "encode_snapshot");
  std::vector<unsigned char> out;
  out.reserve(snapshot_size(g.nx, g.ny));
  out.insert(out.end(), magic, magic + 4);
  put<std::uint32_t>(out, snapshot_version);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.nx));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.ny));
  put<double>(out, state.t);
  put_array(out, state.phi.values);
  put_array(out, state.mu.values);
  put_array(out, state.p.values);
  put_array(out, state.v.u);
  put_array(out, state.v.v);
  return out;
}

SnapshotData decode_snapshot(const std::vector<unsigned char>& bytes) {
  Cursor c(bytes);
  char m[4];
  for (char& ch : m) ch = static_cast<char>(c.get<unsigned char>("magic"));
  if (std::memcmp(m, magic, 4) != 0) throw Error(ErrorKind::format, "bad magic at offset 0: expected \"EPSF\"");
  const auto version = c.get<std::uint32_t>("version");
  if (version != snapshot_version) {
    std::ostringstream os;
    os << "unsupported snapshot version " << version << " at offset 4 (expected " << snapshot_version << ")";
    throw Error(ErrorKind::format, os.str());
  }
  SnapshotData d;
  d.nx = c.get<std::uint32_t>("nx");
  d.ny = c.get<std::uint32_t>("ny");
  if (d.nx == 0 || d.ny == 0) throw Error(ErrorKind::format, "zero grid size at offset 8");
  d.t = c.get<double>("t");
  const std::size_t cells = static_cast<std::size_t>(d.nx) * d.ny;
  d.phi = c.array(cells, "phi");
  d.mu = c.array(cells, "mu");
  d.p = c.array(cells, "p");
  d.u = c.array(static_cast<std::size_t>(d.nx + 1) * d.ny, "u");
  d.v = c.array(static_cast<std::size_t>(d.nx) * (d.ny + 1), "v");
  if (c.pos() != bytes.size()) {
    std::ostringstream os;
    os << "trailing bytes after offset " << c.pos();
    throw Error(ErrorKind::format, os.str());
  }
  return d;
}

void write_snapshot(const SimState& state, const std::string& path) {
  const auto bytes = encode_snapshot(state);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::io, "write failed: '" + path + "'");
}

SnapshotData read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

class CsvBuilder {
 public:
  explicit CsvBuilder(const char* header) : text_(header) { text_ += '\n'; }
  CsvBuilder& cell(double x) { return raw(format_number(x)); }
  CsvBuilder& raw(const std::string& s) {
    if (!first_) text_ += ',';
    text_ += s;
    first_ = false;
    return *this;
  }
  void end_row() {
    text_ += '\n';
    first_ = true;
  }
  std::string str() const { return text_; }

 private:
  std::string text_;
  bool first_ = true;
};

}  // namespace

std::string timeseries_csv(const std::vector<EnergyRecord>& records) {
  CsvBuilder csv("t,kinetic,e0_part,potential_part,total,dissipation_cum,mass_mean,max_abs_phi,div_v_norm");
  for (const EnergyRecord& r : records) {
    csv.cell(r.t).cell(r.kinetic).cell(r.e0).cell(r.potential).cell(r.total()).cell(r.dissipation_cum);
    csv.cell(r.mass_mean).cell(r.max_abs_phi).cell(r.div_v_norm);
    csv.end_row();
  }
  return csv.str();
}

std::string sweep_csv(const SweepReport& report) {
  CsvBuilder csv("eps,sup_L2_phi_diff,L2QT_v_diff,L2L2_mu_diff,init_energy_gap,audit_max");
  for (const SweepRow& r : report.rows) {
    csv.cell(r.eps).cell(r.sup_l2_phi).cell(r.l2qt_v).cell(r.l2l2_mu).cell(r.init_energy_gap).cell(r.audit_max);
    csv.end_row();
  }
  return csv.str();
}

std::string gamma_csv(const GammaTable& table) {
  CsvBuilder csv("eps,E0_eps,E0,rel_error,under_resolved");
  for (const GammaRow& r : table.rows) {
    csv.cell(r.eps).cell(r.e0_eps).cell(r.e0).cell(r.rel_error).raw(r.under_resolved ? "1" : "0");
    csv.end_row();
  }
  return csv.str();
}

std::string operator_csv(const OperatorTable& table) {
  CsvBuilder csv("eps,b_eps,target,error,rel_error,under_resolved");
  for (const OperatorRow& r : table.rows) {
    csv.cell(r.eps).cell(r.b_eps).cell(r.target).cell(r.error).cell(r.rel_error).raw(r.under_resolved ? "1" : "0");
    csv.end_row();
  }
  return csv.str();
}

std::string lemma34_csv(const SweepReport& report) {
  CsvBuilder csv("eps1,eps2,t,lhs,energy_term,dual_term,c_impl");
  for (const Lemma34Sample& s : report.lemma34) {
    csv.cell(s.eps1).cell(s.eps2).cell(s.t).cell(s.record.lhs).cell(s.record.energy_term);
    csv.cell(s.record.dual_term).cell(s.record.c_impl);
    csv.end_row();
  }
  return csv.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error(ErrorKind::io, "write failed: '" + path + "'");
}

}  // namespace nscheps
