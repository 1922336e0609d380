#include <doctest.h>

#include <string>

#include "fsat/config.hpp"
#include "fsat/error.hpp"

using namespace fsat;

namespace {

ErrorKind kind_of(std::string_view text) {
  try {
    validate_config(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("config was accepted: " << text);
  return ErrorKind::IoError;
}

std::string message_of(std::string_view text) {
  try {
    validate_config(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("minimal config gets defaults") {
  const auto c = validate_config("ensemble = CUE\ndim = 64\ndeltas = [0.1]\nseeds = [1]\n");
  CHECK(c.ensemble == Ensemble::CUE);
  CHECK(c.dim == 64);
  CHECK(c.window.start == 2000);
  CHECK(c.window.count == 2000);
  CHECK(c.estimator == EstimatorChoice::Both);
  CHECK(c.bins == 101);
  CHECK(c.eigenstates.all);
  CHECK(c.perturbation == PerturbationForm::QubitCollectiveZ);
  CHECK(c.estimators().size() == 2);
}

TEST_CASE("non-power-of-two dimension with the qubit perturbation") {
  CHECK(kind_of("ensemble = CUE\ndim = 100\ndeltas = [0.1]\nseeds = [1]\n") == ErrorKind::SemanticError);
  CHECK(message_of("ensemble = CUE\ndim = 100\ndeltas = [0.1]\nseeds = [1]\n").find("power-of-two") !=
        std::string::npos);
}

TEST_CASE("QKT dimension resolves to half-integer spin") {
  const auto c = validate_config("ensemble = QKT\ndim = 256\ndeltas = [0.1]\nseeds = [1]\n");
  REQUIRE(c.j.has_value());
  CHECK(c.j->value() == 127.5);
  CHECK(c.k == 12.0);
  CHECK(c.perturbation == PerturbationForm::SpinJz);
  CHECK(c.perturbation_spec(0.1).form == PerturbationForm::SpinJz);
}

TEST_CASE("QKT-oe resolves the measured odd dimension") {
  const auto c = validate_config("ensemble = QKT-oe\nj = 256\ndeltas = [0.1]\nseeds = [1]\n");
  CHECK(c.dim == 256);
  CHECK(c.perturbation_spec(0.1).n_qubits == 8);
  CHECK(kind_of("ensemble = QKT-oe\nj = 127.5\ndeltas = [0.1]\nseeds = [1]\n") == ErrorKind::SemanticError);
  CHECK(kind_of("ensemble = QKT-oe\nj = 256\nperturbation = spin\ndeltas = [0.1]\nseeds = [1]\n") ==
        ErrorKind::SemanticError);
  CHECK(odd_subspace_dim(Spin::from_value(3.0)) == 4);
  CHECK(odd_subspace_dim(Spin::from_value(4.0)) == 4);
  CHECK(odd_subspace_dim(Spin::from_value(4.5)) == 0);
}

TEST_CASE("parse errors name the line and field") {
  const std::string msg = message_of("ensemble = CUE\ndim = 64\ndeltas = [0.1, x]\nseeds = [1]\n");
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("deltas") != std::string::npos);
  CHECK(kind_of("ensemble = CUE\ndim = 64\ndeltas = [0.1, x]\nseeds = [1]\n") == ErrorKind::ParseError);
  CHECK(kind_of("ensemble = CUE\ncolour = red\n") == ErrorKind::ParseError);
  CHECK(kind_of("ensemble = CUE\ndim 64\n") == ErrorKind::ParseError);
  CHECK(kind_of("ensemble = CUE\ndim = 64\ndim = 32\n") == ErrorKind::ParseError);
  CHECK(kind_of("ensemble = CUE\ndim = 64\ndeltas = 0.1\nseeds = [1]\n") == ErrorKind::ParseError);
}

TEST_CASE("semantic contradictions") {
  CHECK(kind_of("dim = 64\ndeltas = [0.1]\nseeds = [1]\n") == ErrorKind::SemanticError);
  CHECK(kind_of("ensemble = CUE\ndim = 64\ndeltas = [0.2, 0.1]\nseeds = [1]\n") == ErrorKind::SemanticError);
  CHECK(kind_of("ensemble = CUE\ndim = 64\ndeltas = [-0.1]\nseeds = [1]\n") == ErrorKind::SemanticError);
  CHECK(kind_of("ensemble = CUE\ndim = 64\ndeltas = []\nseeds = [1]\n") == ErrorKind::SemanticError);
  CHECK(kind_of("ensemble = CUE\ndim = 64\ndeltas = [0.1]\nseeds = []\n") == ErrorKind::SemanticError);
  CHECK(kind_of("ensemble = CUE\ndim = 64\ndeltas = [0.1]\nseeds = [1, 1]\n") == ErrorKind::SemanticError);
  CHECK(kind_of("ensemble = CUE\ndim = 64\nk = 3\ndeltas = [0.1]\nseeds = [1]\n") == ErrorKind::SemanticError);
  CHECK(kind_of("ensemble = QKT\ndim = 256\nj = 3\ndeltas = [0.1]\nseeds = [1]\n") == ErrorKind::SemanticError);
  CHECK(kind_of("ensemble = CUE\ndim = 64\ndeltas = [0.1]\nseeds = [1]\neigenstates = sample(65, 1)\n") ==
        ErrorKind::SemanticError);
}

TEST_CASE("comments, sampling and optional fields") {
  const auto c = validate_config(
      "# sweep\n"
      "ensemble = COE   # orthogonal class\n"
      "dim = 32\n"
      "deltas = [0, 0.1, 0.25]\n"
      "seeds = [3, 1]\n"
      "eigenstates = sample(8, 42)\n"
      "window = [100, 50]\n"
      "estimator = ipr\n"
      "fit_window = [0.1, 0.3]\n"
      "workers = 3\n");
  CHECK(c.deltas.size() == 3);
  CHECK(c.seeds == std::vector<std::uint64_t>{3, 1});
  CHECK_FALSE(c.eigenstates.all);
  CHECK(c.eigenstates.count == 8);
  CHECK(c.window.start == 100);
  CHECK(c.estimators().size() == 1);
  REQUIRE(c.fit_window.has_value());
  CHECK(c.fit_window->hi == 0.3);
  CHECK(c.workers == 3);
}

TEST_CASE("canonical text round-trips and ignores run-only fields") {
  const auto a = validate_config("ensemble = CUE\ndim = 64\ndeltas = [0.1, 0.3]\nseeds = [1]\nworkers = 4\n");
  const auto b = validate_config("seeds=[1]\n  deltas = [0.1,0.3]\ndim=64\nensemble=CUE\noutput_dir = elsewhere\n");
  CHECK(a.hash() == b.hash());
  CHECK(validate_config(a.canonical_text()).hash() == a.hash());
  const auto c = validate_config("ensemble = CUE\ndim = 64\ndeltas = [0.1, 0.31]\nseeds = [1]\n");
  CHECK(c.hash() != a.hash());
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
}
