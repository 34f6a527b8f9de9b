#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include "metasymnet/benchmarks.hpp"

namespace metasymnet {

namespace {

using E = Expression;

E x(int i) { return E::variable(i - 1); }
E x(int i, double w, double b) { return E::variable(i - 1, w, b); }
E cst(double v) { return E::variable(0, 0.0, v); }

// Folds an extra affine layer w*e + b into e's root node.
E affine(const E& e, double w, double b) {
  const auto& r = e.root();
  auto node = std::make_shared<E::Node>();
  node->symbol = r.symbol;
  node->w = w * r.w;
  node->b = w * r.b + b;
  node->children = r.children;
  return E::from_node(std::move(node));
}

E add(const E& a, const E& b) { return E::binary(Op::Add, a, b); }
E sub(const E& a, const E& b) { return E::binary(Op::Sub, a, b); }
E mul(const E& a, const E& b) { return E::binary(Op::Mul, a, b); }
E dvd(const E& a, const E& b) { return E::binary(Op::Div, a, b); }
E sin_(const E& a) { return E::unary(Op::Sin, a); }
E cos_(const E& a) { return E::unary(Op::Cos, a); }
E exp_(const E& a) { return E::unary(Op::Exp, a); }
E log_(const E& a) { return E::unary(Op::Log, a); }
E sqrt_(const E& a) { return E::unary(Op::Sqrt, a); }

E pw(const E& base, int p) {
  if (p == 1) return base;
  if (p % 2 == 0) {
    const E half = pw(base, p / 2);
    return mul(half, half);
  }
  return mul(base, pw(base, p - 1));
}

// Real exponent via exp(p * log(v)); with protected log this reads |v|^p.
E powf(const E& base, double p) { return exp_(affine(log_(base), p, 0.0)); }
E tan_(const E& a) { return dvd(sin_(a), cos_(a)); }
E tanh_(const E& a) {
  const E ep = exp_(a);
  const E en = exp_(affine(a, -1.0, 0.0));
  return dvd(sub(ep, en), add(ep, en));
}

// x^1 + x^2 + ... + x^hi, highest power first.
E poly_sum(int hi) {
  E acc = x(1);
  for (int p = 2; p <= hi; ++p) acc = add(pw(x(1), p), acc);
  return acc;
}

SamplingSpec U(double lo, double hi, int c) { return SamplingSpec::uniform(lo, hi, c); }
SamplingSpec Ev(double lo, double hi, int c) { return SamplingSpec::even(lo, hi, c); }

constexpr double kPi = 3.14159265358979323846;
constexpr double kEulerGamma = 0.57721566490153286;

std::vector<BenchmarkEntry> build_registry() {
  std::vector<BenchmarkEntry> r;
  auto put = [&r](const char* name, E expr, SamplingSpec spec, int k) {
    r.push_back(BenchmarkEntry{name, std::move(expr), spec, k});
  };

  // --- Nguyen ---
  put("Nguyen-1", poly_sum(3), U(-1, 1, 20), 1);
  put("Nguyen-2", poly_sum(4), U(-1, 1, 20), 1);
  put("Nguyen-3", poly_sum(5), U(-1, 1, 20), 1);
  put("Nguyen-4", poly_sum(6), U(-1, 1, 20), 1);
  put("Nguyen-5", affine(mul(sin_(pw(x(1), 2)), cos_(x(1))), 1, -1), U(-1, 1, 20), 1);
  put("Nguyen-6", add(sin_(x(1)), sin_(add(x(1), pw(x(1), 2)))), U(-1, 1, 20), 1);
  put("Nguyen-7", add(log_(x(1, 1, 1)), log_(affine(pw(x(1), 2), 1, 1))), U(0, 2, 20), 1);
  put("Nguyen-8", sqrt_(x(1)), U(0, 4, 20), 1);
  put("Nguyen-9", add(sin_(x(1)), sin_(pw(x(2), 2))), U(0, 1, 20), 2);
  put("Nguyen-10", affine(mul(sin_(x(1)), cos_(x(2))), 2, 0), U(0, 1, 20), 2);
  put("Nguyen-11", exp_(mul(x(2), log_(x(1)))), U(0, 1, 20), 2);
  put("Nguyen-12",
      add(sub(pw(x(1), 4), pw(x(1), 3)), sub(affine(pw(x(2), 2), 0.5, 0), x(2))),
      U(0, 1, 20), 2);
  put("Nguyen-2p",
      add(affine(pw(x(1), 4), 4, 0),
          add(affine(pw(x(1), 3), 3, 0), add(affine(pw(x(1), 2), 2, 0), x(1)))),
      U(-1, 1, 20), 1);
  put("Nguyen-5p", affine(mul(sin_(pw(x(1), 2)), cos_(x(1))), 1, -2), U(-1, 1, 20), 1);
  put("Nguyen-8p", powf(x(1), 1.0 / 3), U(0, 4, 20), 1);
  put("Nguyen-8pp", powf(x(1), 2.0 / 3), U(0, 4, 20), 1);
  put("Nguyen-1c",
      add(affine(pw(x(1), 3), 3.39, 0), add(affine(pw(x(1), 2), 2.12, 0), x(1, 1.78, 0))),
      U(-1, 1, 20), 1);
  put("Nguyen-5c", affine(mul(sin_(pw(x(1), 2)), cos_(x(1))), 1, -0.75), U(-1, 1, 20), 1);
  put("Nguyen-7c", add(log_(x(1, 1, 1.4)), log_(affine(pw(x(1), 2), 1, 1.3))), U(0, 2, 20), 1);
  put("Nguyen-8c", sqrt_(x(1, 1.23, 0)), U(0, 4, 20), 1);
  put("Nguyen-10c", mul(sin_(x(1, 1.5, 0)), cos_(x(2, 0.5, 0))), U(0, 1, 20), 2);

  // --- Korns ---
  put("Korns-1", affine(pw(x(1), 4), 24.3, 1.57), U(-1, 1, 20), 1);
  put("Korns-2", affine(dvd(add(x(4), x(1)), x(2, 3, 0)), 14.2, 0.23), U(-1, 1, 20), 4);
  put("Korns-3",
      affine(dvd(add(sub(x(2), x(1)), dvd(x(1), x(3))), x(3, 3, 0)), 4.9, -5.41),
      U(-1, 1, 20), 3);
  put("Korns-4", affine(sin_(x(1)), 0.13, -2.3), U(-1, 1, 20), 1);
  put("Korns-5", affine(log_(x(5)), 2.13, 3), U(-1, 1, 20), 5);
  put("Korns-6", affine(sqrt_(x(1)), 0.13, 1.3), U(-1, 1, 20), 1);
  put("Korns-7", affine(exp_(x(1, -0.55, 0)), -2.1, 2.1), U(-1, 1, 20), 1);
  put("Korns-8",
      affine(sqrt_(affine(mul(x(1), mul(x(4), x(5))), 7.23, 0)), 11, 6.87),
      U(-1, 1, 20), 5);
  put("Korns-9", affine(sqrt_(affine(mul(x(1), mul(x(2), x(2))), 4.2, 0)), 12, 0),
      U(-1, 1, 20), 2);
  put("Korns-10",
      affine(dvd(add(x(1, 2, 0), affine(pw(x(2), 2), 3, 0)),
                 add(affine(pw(x(3), 3), 4, 0), affine(pw(x(4), 4), 5, 0))),
             24.3, 0.81),
      U(-1, 1, 20), 4);
  put("Korns-11", affine(cos_(affine(pw(x(1), 3), 7.23, 0)), 11, 6.87), U(-1, 1, 20), 1);
  put("Korns-12",
      affine(mul(cos_(affine(pw(x(1), 3), 9.8, 0)), sin_(x(5, 1.3, 0))), -2.1, 2),
      U(-1, 1, 20), 5);
  put("Korns-13",
      affine(mul(dvd(tan_(x(1)), tan_(x(2))), dvd(tan_(x(3)), tan_(x(4)))), -3, 32),
      U(-1, 1, 20), 4);
  put("Korns-14",
      affine(mul(sub(affine(cos_(x(1)), 4.2, 0), tan_(x(2))), dvd(tanh_(x(3)), sin_(x(4)))),
             -1, 22),
      U(-1, 1, 20), 4);
  put("Korns-15",
      affine(mul(dvd(tan_(x(1)), exp_(x(2))), sub(log_(x(3)), tan_(x(4)))), -6, 12),
      U(-1, 1, 20), 4);

  // --- Jin ---
  put("Jin-1",
      add(add(affine(pw(x(1), 4), 2.5, 0), affine(pw(x(1), 3), -1.3, 0)),
          add(affine(pw(x(2), 2), 0.5, 0), x(2, -1.7, 0))),
      U(-3, 3, 100), 2);
  put("Jin-2", add(affine(pw(x(1), 2), 8, 0), affine(pw(x(2), 3), 8, -15)), U(-3, 3, 100), 2);
  put("Jin-3",
      add(add(affine(pw(x(1), 3), 0.2, 0), affine(pw(x(2), 3), 0.5, 0)),
          add(x(2, -1.2, 0), x(1, -0.5, 0))),
      U(-3, 3, 100), 2);
  put("Jin-4", add(affine(exp_(x(1)), 1.5, 0), affine(cos_(x(2)), 5, 0)), U(-3, 3, 100), 2);
  put("Jin-5", affine(mul(sin_(x(1)), cos_(x(2))), 6, 0), U(-3, 3, 100), 2);
  put("Jin-6",
      add(affine(mul(x(1), x(2)), 1.35, 0),
          affine(sin_(mul(x(1, 1, -1), x(2, 1, -1))), 5.5, 0)),
      U(-3, 3, 100), 2);

  // --- Neat ---
  put("Neat-1", poly_sum(4), U(-1, 1, 20), 1);
  put("Neat-2", poly_sum(5), U(-1, 1, 20), 1);
  put("Neat-3", affine(mul(sin_(pw(x(1), 2)), cos_(x(1))), 1, -1), U(-1, 1, 20), 1);
  put("Neat-4", add(log_(x(1, 1, 1)), log_(affine(pw(x(1), 2), 1, 1))), U(0, 2, 20), 1);
  put("Neat-5", affine(mul(sin_(x(1)), cos_(x(2))), 2, 0), U(-1, 1, 100), 2);
  // Harmonic series surrogate: ln x + gamma + 1/(2x) - 1/(12 x^2).
  put("Neat-6",
      add(affine(log_(x(1)), 1, kEulerGamma),
          sub(affine(dvd(cst(1), x(1)), 0.5, 0), affine(dvd(cst(1), pw(x(1), 2)), 1.0 / 12, 0))),
      Ev(1, 50, 50), 1);
  put("Neat-7",
      affine(mul(cos_(x(1, 9.8, 0)), sin_(x(2, 1.3, 0))), -2.1, 2),
      Ev(-50, 50, 100000), 2);
  put("Neat-8",
      dvd(exp_(affine(pw(x(1), 2), -1, 0)),
          affine(pw(x(2, 1, -2.5), 2), 1, 1.2)),
      U(0.3, 4, 100), 2);
  put("Neat-9",
      add(dvd(cst(1), affine(dvd(cst(1), pw(x(1), 4)), 1, 1)),
          dvd(cst(1), affine(dvd(cst(1), pw(x(2), 4)), 1, 1))),
      Ev(-5, 5, 21), 2);

  // --- Keijzer ---
  put("Keijzer-1", affine(mul(x(1), sin_(x(1, 2 * kPi, 0))), 0.3, 0), U(-1, 1, 20), 1);
  put("Keijzer-2", affine(mul(x(1), sin_(x(1, 0.5 * kPi, 0))), 2.0, 0), U(-1, 1, 20), 1);
  put("Keijzer-3", affine(mul(x(1), sin_(x(1, 2.41 * kPi, 0))), 0.92, 0), U(-1, 1, 20), 1);
  put("Keijzer-4",
      mul(mul(pw(x(1), 3), exp_(x(1, -1, 0))),
          mul(mul(cos_(x(1)), sin_(x(1))),
              affine(mul(pw(sin_(x(1)), 2), cos_(x(1))), 1, -1))),
      U(-1, 1, 20), 1);
  put("Keijzer-5", affine(log_(x(5)), 2.13, 3), U(-1, 1, 20), 5);
  put("Keijzer-6", affine(mul(x(1), x(1, 1, 1)), 0.5, 0), U(-1, 1, 20), 1);
  put("Keijzer-7", log_(x(1)), U(0, 1, 20), 1);
  put("Keijzer-8", sqrt_(x(1)), U(0, 1, 20), 1);
  put("Keijzer-9", log_(add(x(1), sqrt_(affine(pw(x(1), 2), 1, 1)))), U(-1, 1, 20), 1);
  put("Keijzer-10", exp_(mul(x(2), log_(x(1)))), U(-1, 1, 20), 2);
  put("Keijzer-11",
      add(mul(x(1), x(2)), sin_(mul(x(1, 1, -1), x(2, 1, -1)))),
      U(-1, 1, 20), 2);
  put("Keijzer-12",
      add(sub(pw(x(1), 4), pw(x(1), 3)), sub(affine(pw(x(2), 2), 0.5, 0), x(2))),
      U(-1, 1, 20), 2);
  put("Keijzer-13", affine(mul(sin_(x(1)), cos_(x(2))), 6, 0), U(-1, 1, 20), 2);
  put("Keijzer-14", dvd(cst(8), affine(add(pw(x(1), 2), pw(x(2), 2)), 1, 2)), U(-1, 1, 20), 2);
  put("Keijzer-15",
      add(add(affine(pw(x(1), 3), 0.2, 0), affine(pw(x(2), 3), 0.5, 0)),
          sub(x(2, -1, 0), x(1))),
      U(-1, 1, 20), 2);

  // --- Livermore ---
  put("Livermore-1", affine(add(x(1), sin_(pw(x(1), 2))), 1, 1.0 / 3), U(-3, 3, 100), 1);
  put("Livermore-2", affine(mul(sin_(pw(x(1), 2)), cos_(x(1))), 1, -2), U(-3, 3, 100), 1);
  put("Livermore-3", affine(mul(sin_(pw(x(1), 3)), cos_(pw(x(1), 2))), 1, -1), U(-3, 3, 100), 1);
  put("Livermore-4",
      add(add(log_(x(1, 1, 1)), log_(affine(pw(x(1), 2), 1, 1))), log_(x(1))),
      U(-3, 3, 100), 1);
  put("Livermore-5",
      add(sub(pw(x(1), 4), pw(x(1), 3)), sub(pw(x(2), 2), x(2))),
      U(-3, 3, 100), 2);
  put("Livermore-6",
      add(affine(pw(x(1), 4), 4, 0),
          add(affine(pw(x(1), 3), 3, 0), add(affine(pw(x(1), 2), 2, 0), x(1)))),
      U(-3, 3, 100), 1);
  put("Livermore-7", affine(sub(exp_(x(1)), exp_(x(1, -1, 0))), 0.5, 0), U(-1, 1, 100), 1);
  put("Livermore-8", affine(add(exp_(x(1)), exp_(x(1, -1, 0))), 1.0 / 3, 0), U(-3, 3, 100), 1);
  put("Livermore-9", poly_sum(9), U(-1, 1, 100), 1);
  put("Livermore-10", affine(mul(sin_(x(1)), cos_(x(2))), 6, 0), U(-3, 3, 100), 2);
  put("Livermore-11", dvd(mul(pw(x(1), 2), pw(x(2), 2)), add(x(1), x(2))), U(-3, 3, 100), 2);
  put("Livermore-12", dvd(pw(x(1), 5), pw(x(2), 3)), U(-3, 3, 100), 2);
  put("Livermore-13", powf(x(1), 1.0 / 3), U(-3, 3, 100), 1);
  put("Livermore-14",
      add(poly_sum(3), add(sin_(x(1)), sin_(pw(x(2), 2)))),
      U(-1, 1, 100), 2);
  put("Livermore-15", powf(x(1), 1.0 / 5), U(-3, 3, 100), 1);
  put("Livermore-16", powf(x(1), 2.0 / 3), U(-3, 3, 100), 1);
  put("Livermore-17", affine(mul(sin_(x(1)), cos_(x(2))), 4, 0), U(-3, 3, 100), 2);
  put("Livermore-18", affine(mul(sin_(pw(x(1), 2)), cos_(x(1))), 1, -5), U(-3, 3, 100), 1);
  put("Livermore-19", add(pw(x(1), 5), add(pw(x(1), 4), add(pw(x(1), 2), x(1)))),
      U(-3, 3, 100), 1);
  put("Livermore-20", exp_(affine(pw(x(1), 2), -1, 0)), U(-3, 3, 100), 1);
  put("Livermore-21", poly_sum(8), U(-1, 1, 20), 1);
  put("Livermore-22", exp_(affine(pw(x(1), 2), -0.5, 0)), U(-3, 3, 100), 1);

  // --- Vladislavleva ---
  put("Vladislavleva-1",
      dvd(exp_(affine(pw(x(1, 1, -1), 2), -1, 0)), affine(pw(x(2, 1, -2.5), 2), 1, 1.2)),
      U(-1, 1, 20), 2);
  put("Vladislavleva-2",
      mul(mul(exp_(x(1, -1, 0)), pw(x(1), 3)),
          mul(mul(cos_(x(1)), sin_(x(1))),
              affine(mul(cos_(x(1)), pw(sin_(x(1)), 2)), 1, -1))),
      U(-1, 1, 20), 1);
  put("Vladislavleva-3",
      mul(mul(mul(exp_(x(1, -1, 0)), pw(x(1), 3)),
              mul(mul(cos_(x(1)), sin_(x(1))),
                  affine(mul(cos_(x(1)), pw(sin_(x(1)), 2)), 1, -1))),
          x(2, 1, -5)),
      U(-1, 1, 20), 2);
  put("Vladislavleva-4",
      dvd(cst(10), affine(add(add(pw(x(1, 1, -3), 2), pw(x(2, 1, -3), 2)),
                              add(pw(x(3, 1, -3), 2),
                                  add(pw(x(4, 1, -3), 2), pw(x(5, 1, -3), 2)))),
                          1, 5)),
      U(0, 2, 20), 5);
  put("Vladislavleva-5",
      affine(dvd(mul(mul(x(1, 1, -1), x(3, 1, -1)), pw(x(2), 2)), x(1, 1, -10)), 30, 0),
      U(-1, 1, 100), 3);
  put("Vladislavleva-6", affine(mul(sin_(x(1)), cos_(x(2))), 6, 0), Ev(1, 50, 50), 2);
  put("Vladislavleva-7",
      affine(mul(cos_(x(1, 9.8, 0)), sin_(x(2, 1.3, 0))), -2.1, 2),
      Ev(-50, 50, 100000), 2);
  put("Vladislavleva-8",
      dvd(exp_(affine(pw(x(1, 1, -1), 2), -1, 0)), affine(pw(x(2, 1, -2.5), 2), 1, 1.2)),
      U(0.3, 4, 100), 2);

  // --- Others ---
  put("Test-2", affine(pw(x(1), 2), 3.14, 0), U(-1, 1, 20), 1);
  put("Const-Test-1", affine(pw(x(1), 2), 5, 0), U(-1, 1, 20), 1);
  put("GrammarVAE-1", affine(add(x(1), sin_(pw(x(1), 2))), 1, 1.0 / 3), U(-1, 1, 20), 1);
  put("Sine", add(sin_(x(1)), sin_(add(x(1), pw(x(1), 2)))), U(-1, 1, 20), 1);
  put("Nonic", poly_sum(9), U(-1, 1, 100), 1);
  put("Pagie-1",
      dvd(cst(1), add(affine(dvd(cst(1), pw(x(1), 4)), 1, 1),
                      dvd(cst(1), affine(dvd(cst(1), pw(x(2), 4)), 1, 1)))),
      Ev(1, 50, 50), 2);
  put("Meier-3", dvd(mul(pw(x(1), 2), pw(x(2), 2)), add(x(1), x(2))), Ev(-50, 50, 100000), 2);
  put("Meier-4", dvd(pw(x(1), 5), pw(x(2), 3)), U(0.3, 4, 100), 2);
  put("Poly-10",
      add(add(mul(x(1), x(2)), mul(x(3), x(4))),
          add(mul(x(5), x(6)),
              add(mul(x(1), mul(x(7), x(9))), mul(x(3), mul(x(6), x(10)))))),
      Ev(-1, 1, 100), 10);

  // --- Constant ---
  put("Constant-1",
      add(affine(pw(x(1), 3), 3.39, 0), add(affine(pw(x(1), 2), 2.12, 0), x(1, 1.78, 0))),
      U(-4, 4, 100), 1);
  put("Constant-2", affine(mul(sin_(pw(x(1), 2)), cos_(x(1))), 1, -0.75), U(-4, 4, 100), 1);
  put("Constant-3", mul(sin_(x(1, 1.5, 0)), cos_(x(2, 0.5, 0))), U(0.1, 4, 100), 2);
  put("Constant-4", affine(exp_(mul(x(2), log_(x(1)))), 2.7, 0), U(0.3, 4, 100), 2);
  put("Constant-5", sqrt_(x(1, 1.23, 0)), U(0.1, 4, 100), 1);
  put("Constant-6", powf(x(1), 0.426), U(0, 4, 100), 1);
  put("Constant-7", affine(mul(sin_(x(1, 1.3, 0)), cos_(x(2))), 2, 0), U(-4, 4, 100), 2);
  put("Constant-8", add(log_(x(1, 1, 1.4)), log_(affine(pw(x(1), 2), 1, 1.3))), U(-4, 4, 100), 1);

  // --- R ---
  put("R1", dvd(pw(x(1, 1, 1), 3), affine(sub(pw(x(1), 2), x(1)), 1, 1)), U(-5, 5, 100), 1);
  put("R2",
      dvd(affine(sub(pw(x(1), 5), affine(pw(x(1), 3), 3, 0)), 1, 1),
          affine(pw(x(1), 2), 1, 1)),
      U(-4, 4, 100), 1);
  put("R3",
      dvd(add(pw(x(1), 6), pw(x(1), 5)),
          affine(add(add(pw(x(1), 4), pw(x(1), 3)), add(pw(x(1), 2), x(1))), 1, 1)),
      U(-4, 4, 100), 1);

  // --- Feynman subset (dimensionless forms; inputs sampled on U(1, 3)) ---
  put("Feynman-I.6.20a", affine(exp_(affine(pw(x(1), 2), -0.5, 0)), 1.0 / std::sqrt(2 * kPi), 0),
      U(1, 3, 100), 1);
  put("Feynman-I.12.1", mul(x(1), x(2)), U(1, 3, 100), 2);
  put("Feynman-I.12.5", mul(x(1), x(2)), U(1, 3, 100), 2);
  put("Feynman-I.25.13", dvd(x(1), x(2)), U(1, 3, 100), 2);
  put("Feynman-I.29.4", dvd(x(1), x(2)), U(1, 3, 100), 2);
  put("Feynman-I.34.27", mul(x(1), x(2)), U(1, 3, 100), 2);
  put("Feynman-II.8.31", affine(mul(x(1), pw(x(2), 2)), 0.5, 0), U(1, 3, 100), 2);
  put("Feynman-II.27.18", mul(x(1), pw(x(2), 2)), U(1, 3, 100), 2);
  put("Feynman-II.38.3", dvd(mul(x(1), mul(x(2), x(3))), x(4)), U(1, 3, 100), 4);
  put("Feynman-III.12.43", mul(x(1), x(2)), U(1, 3, 100), 2);

  return r;
}

}  // namespace

const std::vector<BenchmarkEntry>& benchmark_registry() {
  static const std::vector<BenchmarkEntry> registry = build_registry();
  return registry;
}

}  // namespace metasymnet
