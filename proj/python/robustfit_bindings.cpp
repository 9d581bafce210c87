#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "robustfit/bench.hpp"
#include "robustfit/correspondence_io.hpp"
#include "robustfit/numerics.hpp"
#include "robustfit/ransac.hpp"
#include "robustfit/robust_subspace.hpp"
#include "robustfit/synthgen.hpp"

namespace py = pybind11;
using namespace robustfit;

namespace {

using PointArray = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;

std::vector<Correspondence> zip_points(const PointArray& x1, const PointArray& x2) {
  if (x1.rows() != x2.rows()) throw InvalidInput("x1 and x2 must have the same number of rows");
  std::vector<Correspondence> out(static_cast<std::size_t>(x1.rows()));
  for (Eigen::Index i = 0; i < x1.rows(); ++i) {
    out[i].x1 = x1.row(i).transpose();
    out[i].x2 = x2.row(i).transpose();
  }
  return out;
}

py::dict dataset_dict(const Dataset& d) {
  PointArray x1(static_cast<Eigen::Index>(d.size()), 2);
  PointArray x2(static_cast<Eigen::Index>(d.size()), 2);
  std::vector<int> labels;
  for (std::size_t i = 0; i < d.size(); ++i) {
    x1.row(i) = d.correspondences[i].x1.transpose();
    x2.row(i) = d.correspondences[i].x2.transpose();
    labels.push_back(d.correspondences[i].label == Label::inlier ? 1 : 0);
  }
  py::dict out;
  out["problem"] = std::string(to_string(d.problem));
  out["width"] = d.image_size.width;
  out["height"] = d.image_size.height;
  out["x1"] = x1;
  out["x2"] = x2;
  if (d.has_labels) out["labels"] = labels;
  return out;
}

subspace::IrlsConfig irls_config(int tau_max, double tol, double weight_floor) {
  subspace::IrlsConfig cfg;
  cfg.tau_max = tau_max;
  cfg.tol = tol;
  cfg.weight_floor = weight_floor;
  return cfg;
}

py::dict irls_dict(const subspace::IrlsResult& r) {
  py::dict out;
  out["basis"] = r.basis;
  out["objective"] = r.objective;
  out["iterations"] = r.iterations;
  out["converged"] = r.converged;
  return out;
}

}  // namespace

PYBIND11_MODULE(_robustfit, m) {
  m.doc() = "LO-RANSAC with DPCP refits for homography and fundamental matrix estimation";

  // Translators run newest first, so derived types are registered last.
  auto& base_exc = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", base_exc.ptr());
  py::register_exception<EstimationFailed>(m, "EstimationFailed", base_exc.ptr());

  m.def("required_iterations",
        [](double confidence, double inlier_ratio, std::size_t ns, std::optional<std::size_t> t_max) {
          return t_max ? required_iterations(confidence, inlier_ratio, ns, *t_max)
                       : required_iterations(confidence, inlier_ratio, ns);
        },
        py::arg("confidence"), py::arg("inlier_ratio"), py::arg("sample_size"),
        py::arg("t_max") = py::none());

  m.def("truncated_quadratic_score",
        [](const std::vector<double>& r, double eps) { return truncated_quadratic_score(r, eps); },
        py::arg("residuals"), py::arg("epsilon"));

  m.def("solve_cubic_real", &numerics::solve_cubic_real, py::arg("c3"), py::arg("c2"),
        py::arg("c1"), py::arg("c0"));
  m.def("least_eigvecs", &numerics::least_eigvecs, py::arg("s"), py::arg("k"));
  m.def("symmetric_eigen",
        [](const Eigen::MatrixXd& s) {
          const auto e = numerics::symmetric_eigen(s);
          return py::make_tuple(e.values, e.vectors);
        },
        py::arg("s"));

  m.def("hartley_normalize",
        [](const PointArray& pts) {
          std::vector<Vec2> v;
          for (Eigen::Index i = 0; i < pts.rows(); ++i) v.emplace_back(pts(i, 0), pts(i, 1));
          const NormalizedPoints n = hartley_normalize(v);
          Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor> out(pts.rows(), 3);
          for (Eigen::Index i = 0; i < pts.rows(); ++i) out.row(i) = n.points[i].transpose();
          return py::make_tuple(Eigen::Matrix3d(n.transform.t), out);
        },
        py::arg("points"));

  m.def("dpcp_irls",
        [](const Eigen::MatrixXd& y, int tau_max, double tol, double weight_floor) {
          return irls_dict(subspace::dpcp_irls(y, irls_config(tau_max, tol, weight_floor)));
        },
        py::arg("y"), py::arg("tau_max") = 100, py::arg("tol") = 1e-5,
        py::arg("weight_floor") = 1e-9);

  m.def("dpcp_irls_basis",
        [](const Eigen::MatrixXd& y, int codim, int tau_max, double tol, double weight_floor) {
          return irls_dict(
              subspace::dpcp_irls_basis(y, codim, irls_config(tau_max, tol, weight_floor)));
        },
        py::arg("y"), py::arg("codim") = 3, py::arg("tau_max") = 100, py::arg("tol") = 1e-5,
        py::arg("weight_floor") = 1e-9);

  m.def("huber_irls",
        [](const Eigen::MatrixXd& y, double c, int tau_max, double tol) {
          return irls_dict(subspace::huber_irls(y, c, irls_config(tau_max, tol, 1e-9)));
        },
        py::arg("y"), py::arg("c") = 0.01, py::arg("tau_max") = 100, py::arg("tol") = 1e-5);

  m.def("synth",
        [](const std::string& problem, std::size_t n_inliers, std::size_t n_outliers, double noise,
           std::uint64_t seed, double width, double height, bool degenerate_planar) {
          synth::SynthConfig cfg;
          cfg.problem = problem_from_string(problem);
          cfg.n_inliers = n_inliers;
          cfg.n_outliers = n_outliers;
          cfg.noise_sigma = noise;
          cfg.seed = seed;
          cfg.image_size = {width, height};
          cfg.degenerate_planar = degenerate_planar;
          const synth::SynthDataset ds = synth::generate(cfg);
          py::dict out = dataset_dict(ds.data);
          out["truth"] = Eigen::Matrix3d(ds.truth.matrix());
          out["attempts"] = ds.meta.attempts;
          return out;
        },
        py::arg("problem"), py::arg("n_inliers") = 100, py::arg("n_outliers") = 0,
        py::arg("noise") = 0.0, py::arg("seed") = 0, py::arg("width") = 640.0,
        py::arg("height") = 480.0, py::arg("degenerate_planar") = false);

  m.def("estimate",
        [](const PointArray& x1, const PointArray& x2, const std::string& problem,
           std::optional<double> epsilon, std::optional<double> sigma, const std::string& lo,
           double confidence, std::size_t t_max, std::uint64_t seed, double huber_c, double width,
           double height) {
          RansacConfig cfg;
          cfg.epsilon = epsilon;
          cfg.sigma = sigma;
          cfg.lo_method = lo_method_from_string(lo);
          cfg.confidence = confidence;
          cfg.t_max = t_max;
          cfg.seed = seed;
          cfg.huber_c = huber_c;
          const auto data = zip_points(x1, x2);
          RunReport r;
          {
            py::gil_scoped_release release;
            r = run_ransac(data, ImageSize{width, height}, problem_from_string(problem), cfg);
          }
          py::dict out;
          out["model"] = Eigen::Matrix3d(r.best->model.matrix());
          out["score"] = r.best->score;
          std::vector<bool> mask(r.best->inlier_mask.begin(), r.best->inlier_mask.end());
          out["inlier_mask"] = mask;
          out["inlier_count"] = r.best->inlier_count;
          out["iterations"] = r.iterations_used;
          out["lo_invocations"] = r.lo_invocations;
          out["epsilon"] = r.epsilon;
          out["score_history"] = r.best_score_history;
          return out;
        },
        py::arg("x1"), py::arg("x2"), py::arg("problem"), py::arg("epsilon") = py::none(),
        py::arg("sigma") = py::none(), py::arg("lo") = "dpcp", py::arg("confidence") = 0.95,
        py::arg("t_max") = 10000, py::arg("seed") = 0, py::arg("huber_c") = 0.01,
        py::arg("width") = 640.0, py::arg("height") = 480.0);

  m.def("read_correspondences",
        [](const std::string& path) {
          return dataset_dict(io::parse_correspondences(std::filesystem::path(path)));
        },
        py::arg("path"));
}
