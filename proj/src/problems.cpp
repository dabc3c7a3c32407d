#include "mirrorprox/problems.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <charconv>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "mirrorprox/errors.hpp"

namespace mirrorprox {
namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string format_matrix(const Eigen::Matrix2d& m) {
  return "[[" + format_double(m(0, 0)) + ", " + format_double(m(0, 1)) + "], [" +
         format_double(m(1, 0)) + ", " + format_double(m(1, 1)) + "]]";
}

std::string format_vector(const Eigen::Vector2d& v) {
  return "[" + format_double(v[0]) + ", " + format_double(v[1]) + "]";
}

const nlohmann::json& field(const nlohmann::json& doc, const char* name) {
  auto it = doc.find(name);
  if (it == doc.end()) throw ParseError(name, std::string("missing field '") + name + "'");
  return *it;
}

double read_number(const nlohmann::json& value, const std::string& name) {
  if (!value.is_number()) throw ParseError(name, "field '" + name + "' must be a number");
  return value.get<double>();
}

Eigen::Vector2d read_vector(const nlohmann::json& doc, const char* name) {
  const auto& v = field(doc, name);
  if (!v.is_array() || v.size() != 2) {
    throw ParseError(name, std::string("field '") + name + "' must be an array of 2 numbers");
  }
  return {read_number(v[0], name), read_number(v[1], name)};
}

Eigen::Matrix2d read_matrix(const nlohmann::json& doc, const char* name) {
  const auto& m = field(doc, name);
  if (!m.is_array() || m.size() != 2 || !m[0].is_array() || !m[1].is_array() ||
      m[0].size() != 2 || m[1].size() != 2) {
    throw ParseError(name, std::string("field '") + name + "' must be a 2x2 array");
  }
  Eigen::Matrix2d out;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) out(r, c) = read_number(m[r][c], name);
  }
  return out;
}

Eigen::Matrix4d random_normal_matrix(std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::Matrix4d g;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) g(r, c) = normal(rng);
  }
  return g;
}

// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the signs
// of R's diagonal folded into Q.
Eigen::Matrix4d haar_orthogonal(std::mt19937_64& rng) {
  const Eigen::HouseholderQR<Eigen::Matrix4d> qr(random_normal_matrix(rng));
  Eigen::Matrix4d q = qr.householderQ();
  const Eigen::Matrix4d r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < 4; ++i) {
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  }
  return q;
}

}  // namespace

bool ProblemSpec::operator==(const ProblemSpec& o) const {
  return a == o.a && b == o.b && c == o.c && d == o.d && p == o.p && q == o.q &&
         seed == o.seed && eig_lo == o.eig_lo && eig_hi == o.eig_hi &&
         l_computed == o.l_computed;
}

Eigen::Matrix4d jacobian(const ProblemSpec& s) {
  Eigen::Matrix4d j;
  j.topLeftCorner<2, 2>() = s.a + s.a.transpose();
  j.topRightCorner<2, 2>() = s.b;
  j.bottomLeftCorner<2, 2>() = s.d.transpose();
  j.bottomRightCorner<2, 2>() = s.c + s.c.transpose();
  return j;
}

Eigen::Vector4d offset(const ProblemSpec& s) {
  Eigen::Vector4d v;
  v << s.p, s.q;
  return v;
}

double player_one_loss(const ProblemSpec& s, const Eigen::Vector2d& x1, const Eigen::Vector2d& x2) {
  return x1.dot(s.a * x1) + x1.dot(s.b * x2) + s.p.dot(x1);
}

double player_two_loss(const ProblemSpec& s, const Eigen::Vector2d& x1, const Eigen::Vector2d& x2) {
  return x2.dot(s.c * x2) + x1.dot(s.d * x2) + s.q.dot(x2);
}

void validate(const ProblemSpec& s) {
  const Eigen::Matrix4d j = jacobian(s);
  if (!j.allFinite() || !offset(s).allFinite() || !std::isfinite(s.l_computed) ||
      !std::isfinite(s.eig_lo) || !std::isfinite(s.eig_hi)) {
    throw ValidationError("problem has non-finite entries");
  }
  const Eigen::Matrix4d sym = 0.5 * (j + j.transpose());
  const Eigen::Vector4d eig =
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d>(sym, Eigen::EigenvaluesOnly).eigenvalues();
  if (eig.minCoeff() < -kMonotonicityTolerance) {
    throw ValidationError("mapping is not monotone: symmetric part has eigenvalue " +
                          format_double(eig.minCoeff()));
  }
  if (eig.minCoeff() < s.eig_lo - kSpectrumTolerance ||
      eig.maxCoeff() > s.eig_hi + kSpectrumTolerance) {
    throw ValidationError("symmetric part spectrum [" + format_double(eig.minCoeff()) + ", " +
                          format_double(eig.maxCoeff()) + "] lies outside [eig_lo, eig_hi]");
  }
  const double norm = spectral_norm(j);
  if (std::abs(s.l_computed - norm) > kSpectrumTolerance) {
    throw ValidationError("l_computed " + format_double(s.l_computed) +
                          " differs from the spectral norm " + format_double(norm));
  }
}

VIProblem to_problem(const ProblemSpec& s) {
  const double lip = s.l_computed > 0.0 ? s.l_computed : 1.0;
  return VIProblem(FeasibleSet::product_of_simplices({2, 2}), Matrix(jacobian(s)),
                   Vector(offset(s)), std::max(lip, spectral_norm(jacobian(s))));
}

ProblemSpec generate_game(std::uint64_t seed, double eig_lo, double eig_hi) {
  if (!(eig_lo >= 0.0) || !(eig_lo <= eig_hi) || !std::isfinite(eig_hi)) {
    throw ContractViolation("generate_game: eigenvalue range must satisfy 0 <= lo <= hi");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;

  const Eigen::Matrix4d q = haar_orthogonal(rng);
  Eigen::Vector4d lambda;
  for (int i = 0; i < 4; ++i) lambda[i] = eig_lo + (eig_hi - eig_lo) * unit(rng);
  Eigen::Matrix4d sym = q * lambda.asDiagonal() * q.transpose();
  sym = (0.5 * (sym + sym.transpose())).eval();

  Eigen::Matrix2d w;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) w(r, c) = normal(rng);
  }
  const double w_norm = spectral_norm(w);
  if (eig_hi > 0.0 && w_norm > 0.0) {
    w *= 0.5 * eig_hi / w_norm;
  } else {
    w.setZero();
  }
  Eigen::Matrix4d j = sym;
  j.topRightCorner<2, 2>() += w;
  j.bottomLeftCorner<2, 2>() -= w.transpose();

  ProblemSpec s;
  s.a = 0.5 * j.topLeftCorner<2, 2>();
  s.b = j.topRightCorner<2, 2>();
  s.d = j.bottomLeftCorner<2, 2>().transpose();
  s.c = 0.5 * j.bottomRightCorner<2, 2>();
  s.p = {normal(rng), normal(rng)};
  s.q = {normal(rng), normal(rng)};
  s.seed = seed;
  s.eig_lo = eig_lo;
  s.eig_hi = eig_hi;
  s.l_computed = spectral_norm(jacobian(s));
  return s;
}

ProblemSpec matching_pennies() {
  ProblemSpec s;
  s.b << 1.0, -1.0, -1.0, 1.0;
  s.d = -s.b;
  s.l_computed = spectral_norm(jacobian(s));
  return s;
}

ProblemSpec zero_game() { return ProblemSpec{}; }

std::string to_text(const ProblemSpec& s) {
  std::ostringstream out;
  out << "{\n"
      << "  \"a\": " << format_matrix(s.a) << ",\n"
      << "  \"b\": " << format_matrix(s.b) << ",\n"
      << "  \"c\": " << format_matrix(s.c) << ",\n"
      << "  \"d\": " << format_matrix(s.d) << ",\n"
      << "  \"p\": " << format_vector(s.p) << ",\n"
      << "  \"q\": " << format_vector(s.q) << ",\n"
      << "  \"seed\": " << s.seed << ",\n"
      << "  \"eig_lo\": " << format_double(s.eig_lo) << ",\n"
      << "  \"eig_hi\": " << format_double(s.eig_hi) << ",\n"
      << "  \"l_computed\": " << format_double(s.l_computed) << "\n"
      << "}\n";
  return out.str();
}

ProblemSpec from_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("", std::string("malformed problem file: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("", "problem file must contain an object");

  ProblemSpec s;
  s.a = read_matrix(doc, "a");
  s.b = read_matrix(doc, "b");
  s.c = read_matrix(doc, "c");
  s.d = read_matrix(doc, "d");
  s.p = read_vector(doc, "p");
  s.q = read_vector(doc, "q");
  const auto& seed = field(doc, "seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
    throw ParseError("seed", "field 'seed' must be a nonnegative integer");
  }
  s.seed = seed.get<std::uint64_t>();
  s.eig_lo = read_number(field(doc, "eig_lo"), "eig_lo");
  s.eig_hi = read_number(field(doc, "eig_hi"), "eig_hi");
  s.l_computed = read_number(field(doc, "l_computed"), "l_computed");
  validate(s);
  return s;
}

void save_spec(const std::filesystem::path& path, const ProblemSpec& spec) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << to_text(spec);
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

ProblemSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

}  // namespace mirrorprox
