#include "ds2/potential.hpp"

#include <cmath>
#include <sstream>

namespace ds2 {

Potential Potential::gaussian(double scale) {
  Potential p;
  p.tag_ = PotentialTag::gaussian;
  p.scale_ = scale;
  return p;
}

Potential Potential::lorentzian(double scale) {
  Potential p;
  p.tag_ = PotentialTag::lorentzian;
  p.scale_ = scale;
  return p;
}

Potential Potential::disk(double rho, double a0) {
  if (!(rho > 0.0) || !(a0 > 0.0)) throw InputError("disk potential needs rho > 0 and A0 > 0");
  Potential p;
  p.tag_ = PotentialTag::disk;
  p.rho_ = rho;
  p.a0_ = a0;
  return p;
}

Potential Potential::aniso_gaussian(double scale) {
  Potential p;
  p.tag_ = PotentialTag::aniso_gaussian;
  p.scale_ = scale;
  return p;
}

Potential Potential::custom(const std::string& text) {
  Potential p;
  p.tag_ = PotentialTag::custom;
  p.expr_ = Expr::parse(text);
  return p;
}

Potential Potential::parse(const std::string& spec) {
  if (spec == "gaussian") return gaussian();
  if (spec == "lorentzian") return lorentzian();
  if (spec == "aniso" || spec == "aniso_gaussian") return aniso_gaussian();
  if (spec.rfind("disk:", 0) == 0) {
    auto rest = spec.substr(5);
    auto colon = rest.find(':');
    if (colon == std::string::npos) throw InputError("disk potential: expected disk:RHO:A0");
    return disk(std::stod(rest.substr(0, colon)), std::stod(rest.substr(colon + 1)));
  }
  if (spec.rfind("expr:", 0) == 0) {
    std::string e = spec.substr(5);
    if (e.size() >= 2 && e.front() == '"' && e.back() == '"') e = e.substr(1, e.size() - 2);
    return custom(e);
  }
  throw InputError("unknown potential '" + spec + "'");
}

std::string Potential::describe() const {
  std::ostringstream os;
  switch (tag_) {
    case PotentialTag::gaussian: os << "gaussian"; break;
    case PotentialTag::lorentzian: os << "lorentzian"; break;
    case PotentialTag::aniso_gaussian: os << "aniso"; break;
    case PotentialTag::disk: os << "disk:" << rho_ << ":" << a0_; return os.str();
    case PotentialTag::custom: return "expr:" + expr_->text();
  }
  if (scale_ != 1.0) os << "*" << scale_;
  return os.str();
}

double Potential::amplitude(double x, double y) const {
  switch (tag_) {
    case PotentialTag::gaussian: return scale_ * std::exp(-(x * x + y * y));
    case PotentialTag::lorentzian: return scale_ / (1.0 + x * x + y * y);
    case PotentialTag::aniso_gaussian: return scale_ * std::exp(-(x * x + 5.0 * y * y + 3.0 * x * y));
    case PotentialTag::disk: return x * x + y * y < rho_ * rho_ ? a0_ : 0.0;
    case PotentialTag::custom: return expr_->eval(x, y);
  }
  return 0.0;
}

Dual Potential::amplitude_grad(double x, double y) const {
  switch (tag_) {
    case PotentialTag::gaussian: {
      double a = scale_ * std::exp(-(x * x + y * y));
      return {a, -2.0 * x * a, -2.0 * y * a};
    }
    case PotentialTag::lorentzian: {
      double d = 1.0 + x * x + y * y;
      double a = scale_ / d;
      return {a, -2.0 * x * a / d, -2.0 * y * a / d};
    }
    case PotentialTag::aniso_gaussian: {
      double a = scale_ * std::exp(-(x * x + 5.0 * y * y + 3.0 * x * y));
      return {a, -(2.0 * x + 3.0 * y) * a, -(10.0 * y + 3.0 * x) * a};
    }
    case PotentialTag::disk: return {amplitude(x, y), 0.0, 0.0};
    case PotentialTag::custom: return expr_->eval_dual(x, y);
  }
  return {};
}

std::array<double, 2> Potential::log_amplitude_grad(double x, double y) const {
  switch (tag_) {
    case PotentialTag::gaussian: return {-2.0 * x, -2.0 * y};
    case PotentialTag::lorentzian: {
      double d = 1.0 + x * x + y * y;
      return {-2.0 * x / d, -2.0 * y / d};
    }
    case PotentialTag::aniso_gaussian: return {-(2.0 * x + 3.0 * y), -(10.0 * y + 3.0 * x)};
    case PotentialTag::disk: return {0.0, 0.0};
    case PotentialTag::custom: {
      Dual d = expr_->eval_dual(x, y);
      if (d.v == 0.0) return {0.0, 0.0};
      return {d.dx / d.v, d.dy / d.v};
    }
  }
  return {0.0, 0.0};
}

bool Potential::is_radial() const {
  switch (tag_) {
    case PotentialTag::gaussian:
    case PotentialTag::lorentzian:
    case PotentialTag::disk: return true;
    case PotentialTag::aniso_gaussian: return false;
    case PotentialTag::custom: return expr_->radial();
  }
  return false;
}

std::optional<std::function<double(double)>> Potential::radial_profile() const {
  if (!is_radial()) return std::nullopt;
  const double c = scale_, rho2 = rho_ * rho_, a0 = a0_;
  switch (tag_) {
    case PotentialTag::gaussian: return std::function<double(double)>([c](double m) { return c * std::exp(-m); });
    case PotentialTag::lorentzian: return std::function<double(double)>([c](double m) { return c / (1.0 + m); });
    case PotentialTag::disk:
      return std::function<double(double)>([rho2, a0](double m) { return m < rho2 ? a0 : 0.0; });
    default: break;
  }
  Potential self = *this;
  return std::function<double(double)>([self](double m) { return self.amplitude(std::sqrt(m), 0.0); });
}

double Potential::radial_amplitude(double r) const { return amplitude(r, 0.0); }

bool Potential::identically_zero() const {
  if (tag_ != PotentialTag::custom) return scale_ == 0.0;
  // probe a few points; expressions like "0" or "0*exp(-r2)"
  for (double x : {0.0, 0.3, -1.1, 2.5})
    for (double y : {0.0, 0.7, -1.9})
      if (expr_->eval(x, y) != 0.0) return false;
  return true;
}

double min_k_bound(double u, double v, double B) {
  if (!(B > v)) throw InputError("min_k_bound: need B > v_norm");
  return B + std::max(u / (4.0 * (B - v)), 0.5 * std::sqrt(u));
}

}  // namespace ds2
