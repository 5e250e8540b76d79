#include <istream>
#include <ostream>

#include <json.hpp>

#include "glcorner/error.hpp"
#include "glcorner/glmin.hpp"

namespace glc {

namespace {

constexpr int kStateVersion = 1;

const char* kind_name(GaugeField::Kind k) {
  switch (k) {
    case GaugeField::Kind::kStandardF: return "standard";
    case GaugeField::Kind::kExplicit: return "explicit";
    case GaugeField::Kind::kAnalytic: return "analytic";
  }
  return "?";
}

}  // namespace

void save_state(std::ostream& out, const GLState& s, const Mesh& mesh) {
  require(static_cast<std::size_t>(s.psi.size()) == mesh.node_count(), ErrorKind::kInvalidParameter,
          "psi length must equal node count");
  nlohmann::json j;
  j["format"] = "glcorner-state";
  j["version"] = kStateVersion;
  j["mesh_fingerprint"] = mesh.fingerprint();
  j["nodes"] = mesh.node_count();
  j["kappa"] = s.kappa;
  j["H"] = s.field_H;
  j["field_energy"] = s.field_energy;
  j["gauge_kind"] = kind_name(s.potential.kind());
  std::vector<double> re, im, ax, ay;
  for (const cplx& z : s.psi) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  for (const Vec2& v : s.potential.nodal()) {
    ax.push_back(v.x);
    ay.push_back(v.y);
  }
  j["psi_re"] = re;
  j["psi_im"] = im;
  j["gauge_nodal_x"] = ax;
  j["gauge_nodal_y"] = ay;
  out << j.dump() << '\n';
  require(static_cast<bool>(out), ErrorKind::kInvalidParameter, "writing the state failed");
}

GLState load_state(std::istream& in, const Mesh& mesh, const GaugeField& base) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kInvalidParameter, std::string("malformed state document: ") + e.what());
  }
  require(j.value("format", "") == "glcorner-state", ErrorKind::kInvalidParameter, "not a state document");
  require(j.value("version", 0) == kStateVersion, ErrorKind::kInvalidParameter, "unsupported state version");
  require(j.at("mesh_fingerprint").get<std::uint64_t>() == mesh.fingerprint(), ErrorKind::kInvalidParameter,
          "state belongs to a different mesh");
  require(j.at("gauge_kind").get<std::string>() == kind_name(base.kind()), ErrorKind::kInvalidParameter,
          "base field kind does not match the stored state");
  const auto re = j.at("psi_re").get<std::vector<double>>(), im = j.at("psi_im").get<std::vector<double>>();
  require(re.size() == mesh.node_count() && im.size() == re.size(), ErrorKind::kInvalidParameter,
          "psi length must equal node count");
  GLState s;
  s.kappa = j.at("kappa").get<double>();
  s.field_H = j.at("H").get<double>();
  s.field_energy = j.at("field_energy").get<double>();
  s.psi.resize(static_cast<Eigen::Index>(re.size()));
  for (std::size_t i = 0; i < re.size(); ++i) s.psi[static_cast<Eigen::Index>(i)] = cplx(re[i], im[i]);
  const auto ax = j.at("gauge_nodal_x").get<std::vector<double>>();
  const auto ay = j.at("gauge_nodal_y").get<std::vector<double>>();
  require(ax.size() == ay.size() && (ax.empty() || ax.size() == mesh.node_count()),
          ErrorKind::kInvalidParameter, "gauge correction has the wrong length");
  std::vector<Vec2> nodal(ax.size());
  for (std::size_t i = 0; i < ax.size(); ++i) nodal[i] = {ax[i], ay[i]};
  s.potential = nodal.empty() ? base : base.with_correction(std::move(nodal));
  return s;
}

}  // namespace glc
