// Python bindings for the main operations: grids, transforms, families,
// norms, surfaces, chain verifiers, sweeps, propagators, counterexamples,
// and the experiment runner.
#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rlab/chains.hpp"
#include "rlab/counterexamples.hpp"
#include "rlab/experiments.hpp"
#include "rlab/fft.hpp"
#include "rlab/interpolation.hpp"
#include "rlab/propagators.hpp"

namespace py = pybind11;
using namespace rlab;

namespace {

py::array_t<cplx> field_values(const Field& f) {
    std::vector<py::ssize_t> shape(f.grid.dim, f.grid.n);
    py::array_t<cplx> out(shape);
    std::copy(f.values.begin(), f.values.end(), out.mutable_data());
    return out;
}

void field_set_values(Field& f, py::array_t<cplx, py::array::c_style | py::array::forcecast> a) {
    if (static_cast<std::size_t>(a.size()) != f.values.size())
        throw ValidationError("values: size must match the grid");
    std::copy(a.data(), a.data() + a.size(), f.values.begin());
}

template <typename T>
py::array_t<T> as_array(const std::vector<T>& v) {
    py::array_t<T> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "numerical laboratory for restriction estimates and dispersive propagators";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    static py::exception<ChainStepError> chain_exc(m, "ChainStepFailure");
    static py::exception<TailBudgetError> tail_exc(m, "TailBudgetFailure");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ChainStepError& e) {
            PyErr_SetString(chain_exc.ptr(), e.what());
        } catch (const TailBudgetError& e) {
            PyErr_SetString(tail_exc.ptr(), e.what());
        }
    });

    py::enum_<Side>(m, "Side").value("physical", Side::Physical).value("frequency", Side::Frequency);

    py::class_<GridSpec>(m, "GridSpec")
        .def_readonly("dim", &GridSpec::dim)
        .def_readonly("n", &GridSpec::n)
        .def_readonly("half_extent", &GridSpec::half_extent)
        .def("dx", &GridSpec::dx)
        .def("dxi", &GridSpec::dxi)
        .def("xi_max", &GridSpec::xi_max)
        .def("__repr__", [](const GridSpec& g) {
            return "GridSpec(dim=" + std::to_string(g.dim) + ", n=" + std::to_string(g.n) +
                   ", half_extent=" + std::to_string(g.half_extent) + ")";
        });
    m.def("make_grid", &make_grid, py::arg("dim"), py::arg("n"), py::arg("half_extent"));

    py::class_<Field>(m, "Field")
        .def(py::init<GridSpec, Side>(), py::arg("grid"), py::arg("side") = Side::Physical)
        .def_readonly("grid", &Field::grid)
        .def_readonly("side", &Field::side)
        .def_property("values", &field_values, &field_set_values)
        .def("mark_transformed", [](Field& f) {
            f.side = Side::Frequency;
            for (int a = 0; a < f.grid.dim; ++a) f.transformed[a] = true;
        });
    m.def("boundary_decay", &boundary_decay);

    m.def("forward_transform", &forward_transform);
    m.def("inverse_transform", &inverse_transform);
    m.def("partial_transform", &partial_transform, py::arg("field"), py::arg("axis"));
    m.def("partial_inverse_transform", &partial_inverse_transform, py::arg("field"),
          py::arg("axis"));
    m.def(
        "interpolate_spectrum",
        [](const Field& fhat, const std::vector<double>& point) {
            return interpolate_spectrum(fhat, point);
        },
        py::arg("fhat"), py::arg("point"));

    // families
    py::class_<Gaussian>(m, "Gaussian")
        .def(py::init([](std::vector<double> center, double width, std::vector<double> modulation) {
                 return Gaussian{std::move(center), width, std::move(modulation)};
             }),
             py::arg("center") = std::vector<double>{}, py::arg("width") = 1.0,
             py::arg("modulation") = std::vector<double>{});
    py::class_<Gaussian1D>(m, "Gaussian1D")
        .def(py::init([](double c, double w, double k) {
                 return Gaussian1D{c, w, k};
             }),
             py::arg("center") = 0.0, py::arg("width") = 1.0, py::arg("modulation") = 0.0);
    py::class_<RingBump>(m, "RingBump")
        .def(py::init([](double inner, double outer) {
                 return RingBump{inner, outer};
             }),
             py::arg("inner"), py::arg("outer"));
    py::class_<KnappPacket>(m, "KnappPacket")
        .def(py::init([](const Sphere& s, double angle, double delta) {
                 return KnappPacket{s, angle, delta};
             }),
             py::arg("surface"), py::arg("cap_angle") = 0.0, py::arg("delta") = 0.25);
    py::class_<TensorProduct>(m, "TensorProduct")
        .def(py::init([](std::vector<Gaussian1D> f) {
            return TensorProduct{std::move(f)};
        }));
    py::class_<HyperplaneDecay>(m, "HyperplaneDecay")
        .def(py::init([](double w) {
                 return HyperplaneDecay{w};
             }),
             py::arg("profile_width") = 1.0);
    m.def("sample", &sample, py::arg("family"), py::arg("grid"), py::arg("decay_budget") = 1e-12);
    m.def(
        "gaussian_transform",
        [](const Gaussian& g, int dim, const std::vector<double>& xi) {
            return gaussian_transform(g, dim, xi);
        },
        py::arg("family"), py::arg("dim"), py::arg("xi"));

    // norms and exponents
    m.def("lp_norm", &lp_norm, py::arg("field"), py::arg("p"));
    m.def("mixed_norm", &mixed_norm, py::arg("field"), py::arg("outer_axes"),
          py::arg("inner_axes"), py::arg("q_outer"), py::arg("r_inner"));
    m.def("sobolev_norm", &sobolev_norm, py::arg("field"), py::arg("s"));
    m.def(
        "sobolev_norm_along_axis",
        [](const Field& f, int axis, double s) {
            ReducedField r = sobolev_norm_along_axis(f, axis, s);
            return std::make_pair(r.grid, as_array(r.values));
        },
        py::arg("field"), py::arg("axis"), py::arg("s"));
    py::class_<Rational>(m, "Rational")
        .def(py::init<long long, long long>(), py::arg("num"), py::arg("den") = 1)
        .def_static("parse", &Rational::parse)
        .def_readonly("num", &Rational::num)
        .def_readonly("den", &Rational::den)
        .def("value", &Rational::value)
        .def("__repr__", [](const Rational& r) {
            return std::to_string(r.num) + "/" + std::to_string(r.den);
        });
    py::class_<ExponentProfile>(m, "ExponentProfile")
        .def_readonly("d", &ExponentProfile::d)
        .def_readonly("p0", &ExponentProfile::p0)
        .def_readonly("p0_prime", &ExponentProfile::p0_prime)
        .def_readonly("alpha", &ExponentProfile::alpha)
        .def_readonly("s", &ExponentProfile::s);
    m.def("exponent_profile", &exponent_profile, py::arg("d"));

    // surfaces
    py::class_<Sphere>(m, "Sphere")
        .def(py::init([](int dim, double radius, int nodes) {
                 return Sphere{dim, radius, nodes};
             }),
             py::arg("ambient_dim"), py::arg("radius"), py::arg("node_count") = 0);
    py::class_<ConeGraph>(m, "ConeGraph")
        .def(py::init([](int base_dim, double slope) {
                 return ConeGraph{base_dim, slope};
             }),
             py::arg("base_dim") = 2, py::arg("slope") = 1.0);
    py::class_<MGraph>(m, "MGraph").def(py::init<>());
    py::class_<MFGraph>(m, "MFGraph")
        .def(py::init([](double froude) {
                 return MFGraph{froude};
             }),
             py::arg("froude"));
    py::class_<HyperplaneGraph>(m, "HyperplaneGraph")
        .def(py::init([](int base_dim, double height) {
                 return HyperplaneGraph{base_dim, height};
             }),
             py::arg("base_dim") = 2, py::arg("height") = 0.0);

    py::class_<SurfaceTrace>(m, "SurfaceTrace")
        .def_property_readonly("values", [](const SurfaceTrace& t) { return as_array(t.values); })
        .def_property_readonly("weights",
                               [](const SurfaceTrace& t) { return as_array(t.weights); })
        .def_property_readonly("nodes",
                               [](const SurfaceTrace& t) {
                                   py::array_t<double> out(
                                       {static_cast<py::ssize_t>(t.nodes.size()), py::ssize_t(4)});
                                   auto r = out.mutable_unchecked<2>();
                                   for (py::ssize_t i = 0; i < r.shape(0); ++i)
                                       for (py::ssize_t j = 0; j < 4; ++j) r(i, j) = t.nodes[i][j];
                                   return out;
                               })
        .def("__len__", [](const SurfaceTrace& t) { return t.values.size(); });
    m.def("restrict_to_surface", &restrict_to_surface, py::arg("fhat"), py::arg("spec"));
    m.def("trace_lq_norm", &trace_lq_norm, py::arg("trace"), py::arg("q"));
    m.def("extension_operator", &extension_operator, py::arg("density"), py::arg("spec"),
          py::arg("t"));
    m.def("product_restrict", &product_restrict, py::arg("fhat"), py::arg("spec_a"),
          py::arg("spec_b"));

    // chain verifier
    py::class_<ChainStep>(m, "ChainStep")
        .def_readonly("label", &ChainStep::label)
        .def_readonly("anchor", &ChainStep::anchor)
        .def_readonly("left", &ChainStep::left)
        .def_readonly("right", &ChainStep::right)
        .def_readonly("constant", &ChainStep::constant)
        .def_readonly("identity", &ChainStep::identity)
        .def_readonly("literal", &ChainStep::literal);
    py::class_<ChainReport>(m, "ChainReport")
        .def_readonly("chain", &ChainReport::chain)
        .def_readonly("steps", &ChainReport::steps)
        .def_readonly("lhs", &ChainReport::lhs)
        .def_readonly("rhs", &ChainReport::rhs)
        .def_readonly("achieved_ratio", &ChainReport::achieved_ratio)
        .def_readonly("bound_constant", &ChainReport::bound_constant)
        .def_readonly("clip_distance", &ChainReport::clip_distance)
        .def_readonly("params", &ChainReport::params);
    py::class_<RatioEstimate>(m, "RatioEstimate")
        .def_readonly("parameter", &RatioEstimate::parameter)
        .def_readonly("numerator", &RatioEstimate::numerator)
        .def_readonly("denominator", &RatioEstimate::denominator)
        .def_readonly("ratio", &RatioEstimate::ratio)
        .def_readonly("compensated", &RatioEstimate::compensated);
    py::class_<ChainOptions>(m, "ChainOptions")
        .def(py::init<>())
        .def_readwrite("identity_tol", &ChainOptions::identity_tol)
        .def_readwrite("literal_slack", &ChainOptions::literal_slack)
        .def_readwrite("level_points", &ChainOptions::level_points)
        .def_readwrite("extension_points", &ChainOptions::extension_points)
        .def_readwrite("throw_on_failure", &ChainOptions::throw_on_failure);
    py::class_<PolarIdentity>(m, "PolarIdentity")
        .def_readonly("left", &PolarIdentity::left)
        .def_readonly("right", &PolarIdentity::right)
        .def_readonly("rel_error", &PolarIdentity::rel_error);
    py::class_<JacobianCheck>(m, "JacobianCheck")
        .def_readonly("xi3", &JacobianCheck::xi3)
        .def_readonly("dxi3_dmu", &JacobianCheck::dxi3_dmu)
        .def_readonly("xi_norm2", &JacobianCheck::xi_norm2)
        .def_readonly("fd_rel_error", &JacobianCheck::fd_rel_error);

    m.def("polar_identity_check", &polar_identity_check, py::arg("field"),
          py::arg("options") = ChainOptions{});
    m.def("verify_cone_chain", &verify_cone_chain, py::arg("field"),
          py::arg("options") = ChainOptions{});
    m.def("verify_m_chain", &verify_M_chain, py::arg("field"), py::arg("options") = ChainOptions{});
    m.def("verify_mf_chain", &verify_MF_chain, py::arg("field"), py::arg("froude"),
          py::arg("options") = ChainOptions{});
    m.def("product_chain_check", &product_chain_check, py::arg("field"), py::arg("circle_a"),
          py::arg("circle_b"), py::arg("options") = ChainOptions{});
    m.def(
        "jacobian_check_m",
        [](double xh0, double xh1, double mu) {
            return jacobian_check_M({xh0, xh1}, mu);
        },
        py::arg("xi_h0"), py::arg("xi_h1"), py::arg("mu"));
    m.def(
        "jacobian_check_mf",
        [](double xh0, double xh1, double mu, double froude) {
            return jacobian_check_MF({xh0, xh1}, mu, froude);
        },
        py::arg("xi_h0"), py::arg("xi_h1"), py::arg("mu"), py::arg("froude"));
    py::class_<ScalingSweepOptions>(m, "ScalingSweepOptions")
        .def(py::init<>())
        .def_readwrite("n", &ScalingSweepOptions::n)
        .def_readwrite("base_half_extent", &ScalingSweepOptions::base_half_extent)
        .def_readwrite("p", &ScalingSweepOptions::p);
    m.def("sphere_scaling_sweep", &sphere_scaling_sweep, py::arg("base"), py::arg("d"),
          py::arg("radii"), py::arg("options") = ScalingSweepOptions{});
    py::class_<SlopeSweepOptions>(m, "SlopeSweepOptions")
        .def(py::init<>())
        .def_readwrite("n", &SlopeSweepOptions::n)
        .def_readwrite("half_extent", &SlopeSweepOptions::half_extent)
        .def_readwrite("modulation", &SlopeSweepOptions::modulation)
        .def_readwrite("width", &SlopeSweepOptions::width);
    m.def("cone_slope_sweep", &cone_slope_sweep, py::arg("slopes"),
          py::arg("options") = SlopeSweepOptions{});
    m.def("sobolev_embedding_check", &sobolev_embedding_check, py::arg("field"), py::arg("p"),
          py::arg("s"));

    // propagators
    py::class_<TimeGrid>(m, "TimeGrid")
        .def(py::init([](double t_end, int steps) {
                 return TimeGrid{t_end, steps};
             }),
             py::arg("t_end"), py::arg("steps") = 256)
        .def_readonly("t_end", &TimeGrid::t_end)
        .def_readonly("steps", &TimeGrid::steps);
    m.def("default_window", &default_window);
    py::class_<WaveData>(m, "WaveData")
        .def(py::init([](const Field& f, const Field& g) {
                 return WaveData{f, g};
             }),
             py::arg("position"), py::arg("velocity"));
    m.def("gamma_decompose", &gamma_decompose);
    m.def("wave_state", &wave_state, py::arg("data"), py::arg("t"));
    m.def("rotating_state", &rotating_state, py::arg("u0"), py::arg("t"), py::arg("sign") = 1);
    py::class_<StrichartzSpec>(m, "StrichartzSpec")
        .def_readonly("q_t", &StrichartzSpec::q_t)
        .def_readonly("r_x", &StrichartzSpec::r_x)
        .def_readonly("sobolev_order", &StrichartzSpec::sobolev_order);
    m.def("rotating_spec", &rotating_spec);
    m.def("rotating_spec_interpolated", &rotating_spec_interpolated, py::arg("q_t"));
    m.def("wave_spec", &wave_spec, py::arg("d"));
    py::class_<StrichartzResult>(m, "StrichartzResult")
        .def_readonly("ratio", &StrichartzResult::ratio)
        .def_readonly("window", &StrichartzResult::window)
        .def_readonly("tail_fraction", &StrichartzResult::tail_fraction);
    m.def(
        "strichartz_ratio_wave",
        [](const WaveData& d, const StrichartzSpec& s, const TimeGrid& t) {
            return strichartz_ratio(d, s, t);
        },
        py::arg("data"), py::arg("spec"), py::arg("time_grid"));
    m.def(
        "strichartz_ratio_rotating",
        [](const Field& u0, const StrichartzSpec& s, const TimeGrid& t, int sign) {
            return strichartz_ratio(u0, s, t, sign);
        },
        py::arg("u0"), py::arg("spec"), py::arg("time_grid"), py::arg("sign") = 1);
    py::class_<AnisotropicResult>(m, "AnisotropicResult")
        .def_readonly("ratio", &AnisotropicResult::ratio)
        .def_readonly("time_outer_value", &AnisotropicResult::time_outer_value)
        .def_readonly("window", &AnisotropicResult::window)
        .def_readonly("tail_fraction", &AnisotropicResult::tail_fraction);
    m.def("anisotropic_ratio", &anisotropic_ratio, py::arg("u0"), py::arg("time_grid"),
          py::arg("sign") = 1);

    // counterexamples
    py::class_<CounterexampleReport>(m, "CounterexampleReport")
        .def_readonly("parameters", &CounterexampleReport::parameters)
        .def_readonly("surface_value", &CounterexampleReport::surface_value)
        .def_readonly("data_norm", &CounterexampleReport::data_norm)
        .def_readonly("ratio", &CounterexampleReport::ratio)
        .def_readonly("ratio_increasing", &CounterexampleReport::ratio_increasing)
        .def_readonly("extras", &CounterexampleReport::extras);
    m.def("hyperplane_failure", &hyperplane_failure, py::arg("profile_width"),
          py::arg("truncations"));
    py::class_<FlatnessProfile>(m, "FlatnessProfile")
        .def(py::init<>())
        .def_readwrite("inner", &FlatnessProfile::inner)
        .def_readwrite("edge", &FlatnessProfile::edge)
        .def_readwrite("cone_margin", &FlatnessProfile::cone_margin);
    m.def("m_flatness_family", &m_flatness_family, py::arg("profile"), py::arg("r_values"),
          py::arg("p"), py::arg("q"));

    // experiment runner
    m.def(
        "run_experiment",
        [](const std::string& name, const std::map<std::string, std::string>& kv) {
            ExperimentConfig cfg;
            cfg.experiment = name;
            cfg.kv = kv;
            std::string err;
            const int code = run(cfg, &err);
            return std::make_pair(code, err);
        },
        py::arg("name"), py::arg("config") = std::map<std::string, std::string>{});
    m.attr("experiments") = ExperimentConfig::known_experiments();
}
