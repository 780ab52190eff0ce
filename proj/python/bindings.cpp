// Python bindings for the core operations. Structured results come back as
// plain dicts and lists so the python side needs no mirrored classes.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "emlab/dynsys.hpp"
#include "emlab/emergence.hpp"
#include "emlab/jets.hpp"
#include "emlab/sinks.hpp"
#include "emlab/transport.hpp"

namespace py = pybind11;
using namespace emlab;

namespace {

PhasePoint make_point(const SystemSpec& sys, const std::vector<double>& coords) {
    if (int(coords.size()) != sys.phase_dim())
        throw UsageError("start point has wrong dimension");
    PhasePoint z;
    for (int i = 0; i < sys.phase_dim(); ++i) z.c[i] = coords[i];
    return z;
}

std::vector<double> point_list(const PhasePoint& z, int dim) {
    std::vector<double> out(z.c.begin(), z.c.begin() + dim);
    return out;
}

DiscreteMeasure make_measure(const std::vector<std::vector<double>>& atoms,
                             const std::vector<double>& weights) {
    if (atoms.empty()) throw UsageError("measure needs at least one atom");
    DiscreteMeasure mu;
    mu.dim = int(atoms[0].size());
    if (mu.dim < 1 || mu.dim > 2) throw UsageError("atoms must have 1 or 2 coordinates");
    for (const auto& a : atoms) {
        if (int(a.size()) != mu.dim) throw UsageError("mixed atom dimensions");
        mu.atoms.push_back({a[0], mu.dim == 2 ? a[1] : 0.0});
    }
    mu.weights = weights;
    mu.validate();
    return mu;
}

py::tuple measure_tuple(const DiscreteMeasure& mu) {
    py::list atoms, weights;
    for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
        py::list a;
        for (int c = 0; c < mu.dim; ++c) a.append(mu.atoms[i][c]);
        atoms.append(a);
        weights.append(mu.weights[i]);
    }
    return py::make_tuple(atoms, weights);
}

py::dict cover_dict(const CoverResult& res) {
    py::dict out;
    out["epsilon"] = res.epsilon;
    out["N"] = res.N;
    out["residual"] = res.residual;
    out["bootstrap_se"] = res.bootstrap_se;
    out["centers"] = res.centers;
    return out;
}

py::dict curve_dict(const EmergenceCurve& curve) {
    py::dict out;
    py::list pts;
    for (const auto& p : curve.points) {
        py::dict row;
        row["epsilon"] = p.epsilon;
        row["N"] = p.N;
        row["residual"] = p.residual;
        row["bootstrap_se"] = p.bootstrap_se;
        pts.append(row);
    }
    out["points"] = pts;
    out["n_used"] = curve.n_used;
    out["survivor_fraction"] = curve.survivor_fraction;
    out["reliable"] = curve.reliable;
    out["stabilization"] = curve.stabilization;
    out["scaling"] = scaling_name(curve.scaling);
    py::dict fit;
    fit["slope"] = curve.fit.slope;
    fit["intercept"] = curve.fit.intercept;
    fit["r2"] = curve.fit.r2;
    fit["last_half_slope"] = curve.fit.last_half_slope;
    out["fit"] = fit;
    return out;
}

py::dict orbit_dict(const PeriodicOrbit& o, int dim) {
    py::dict out;
    out["period"] = o.period;
    py::list pts;
    for (const auto& z : o.points) pts.append(point_list(z, dim));
    out["points"] = pts;
    out["m1"] = o.m1;
    out["m2"] = o.m2;
    out["class"] = orbit_class_name(o.cls);
    out["det"] = o.det;
    out["area_contracting"] = o.area_contracting;
    return out;
}

py::list interval_list(const std::vector<Interval>& v) {
    py::list out;
    for (const auto& iv : v) out.append(py::make_tuple(iv.lo, iv.hi));
    return out;
}

py::dict certificate_dict(const CoverCertificate& cert) {
    py::dict out;
    out["verdict"] = verdict_name(cert.verdict);
    out["d"] = cert.d;
    out["k"] = cert.k;
    out["y_ratio"] = cert.y_ratio;
    out["paper_box_closes"] = cert.paper_box_closes;
    out["x_bound"] = cert.x_bound;
    out["y_bound"] = cert.y_bound;
    out["subdivision_cells"] = cert.subdivision_cells;
    out["certified_x"] = interval_list(cert.certified.x);
    out["certified_y"] = interval_list(cert.certified.y);
    out["gap"] = py::make_tuple(cert.gap.lo, cert.gap.hi);
    out["gap_iteration"] = cert.gap_iteration;
    out["detail"] = cert.detail;
    return out;
}

}  // namespace

PYBIND11_MODULE(_emlab, m) {
    m.doc() = "Emergence laboratory core: dynamics, transport, covering, jets, sinks";

    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
    py::register_exception<EscapeError>(m, "EscapeError");
    py::register_exception<DegenerateDataError>(m, "DegenerateDataError");
    py::register_exception<SaturationError>(m, "SaturationError");

    py::class_<SystemSpec>(m, "SystemSpec")
        .def_property_readonly("name", &SystemSpec::name)
        .def_property_readonly("phase_dim", &SystemSpec::phase_dim)
        .def_property_readonly("param_arity", &SystemSpec::param_arity)
        .def("__repr__",
             [](const SystemSpec& s) { return "<SystemSpec " + s.name() + ">"; });

    m.def("henon", &SystemSpec::henon, py::arg("a"), py::arg("b"));
    m.def("identity", &SystemSpec::identity, py::arg("dim"));
    m.def("rotation", &SystemSpec::rotation, py::arg("alpha"), py::arg("dim"));
    m.def("doubling", &SystemSpec::doubling);
    m.def("planted_sinks", &SystemSpec::planted_sinks, py::arg("n"));
    m.def("parablender_core", &SystemSpec::parablender_core, py::arg("d"), py::arg("k"));
    m.def("parablender_full", &SystemSpec::parablender_full, py::arg("d"), py::arg("k"));

    m.def(
        "step",
        [](const SystemSpec& sys, const ParamPoint& a, const std::vector<double>& z) {
            PhasePoint w = step(sys, a, make_point(sys, z));
            py::dict out;
            out["point"] = point_list(w, sys.phase_dim());
            out["escaped"] = w.escaped;
            return out;
        },
        py::arg("sys"), py::arg("a"), py::arg("z"));

    m.def(
        "orbit",
        [](const SystemSpec& sys, const ParamPoint& a, const std::vector<double>& z0, int n) {
            Trajectory traj = orbit(sys, a, make_point(sys, z0), n);
            py::dict out;
            py::list pts;
            for (const auto& z : traj.points) pts.append(point_list(z, sys.phase_dim()));
            out["points"] = pts;
            out["escaped"] = traj.escaped();
            out["escape_time"] = traj.escape_time;
            return out;
        },
        py::arg("sys"), py::arg("a"), py::arg("z0"), py::arg("n"));

    m.def(
        "w1",
        [](const std::vector<std::vector<double>>& mu_atoms, const std::vector<double>& mu_w,
           const std::vector<std::vector<double>>& nu_atoms, const std::vector<double>& nu_w,
           double scale) {
            return w1(make_measure(mu_atoms, mu_w), make_measure(nu_atoms, nu_w),
                      GroundMetric{scale});
        },
        py::arg("mu_atoms"), py::arg("mu_weights"), py::arg("nu_atoms"),
        py::arg("nu_weights"), py::arg("scale") = 1.0);

    m.def(
        "quantize",
        [](const std::vector<std::vector<double>>& atoms, const std::vector<double>& weights,
           double cell) { return measure_tuple(quantize(make_measure(atoms, weights), cell)); },
        py::arg("atoms"), py::arg("weights"), py::arg("cell"));

    m.def(
        "covering_number",
        [](const std::vector<std::vector<double>>& dist, const std::vector<double>& weights,
           double epsilon) { return cover_dict(covering_number(dist, weights, epsilon)); },
        py::arg("dist"), py::arg("weights"), py::arg("epsilon"));

    m.def(
        "emergence_curve",
        [](const SystemSpec& sys, const ParamPoint& a, const std::vector<int>& n_ladder,
           int sample_count, const std::vector<double>& epsilons, double quantize_cell,
           std::uint64_t seed, int threads) {
            EmergenceQuery q;
            q.n_ladder = n_ladder;
            q.sample_count = sample_count;
            q.epsilons = epsilons;
            q.quantize_cell = quantize_cell;
            q.seed = seed;
            q.threads = threads;
            return curve_dict(emergence_curve(sys, a, q));
        },
        py::arg("sys"), py::arg("a"), py::arg("n_ladder"), py::arg("sample_count"),
        py::arg("epsilons"), py::arg("quantize_cell") = 0.0, py::arg("seed") = 0,
        py::arg("threads") = 1);

    m.def(
        "sink_census",
        [](const SystemSpec& sys, const ParamPoint& a, int max_period, int grid, int threads) {
            CensusResult res = sink_census(sys, a, max_period, grid, threads);
            py::dict out;
            py::list orbits, sinks;
            for (const auto& o : res.orbits) orbits.append(orbit_dict(o, sys.phase_dim()));
            for (const auto& o : res.sinks) sinks.append(orbit_dict(o, sys.phase_dim()));
            out["orbits"] = orbits;
            out["sinks"] = sinks;
            py::dict diag;
            diag["attempts"] = res.diag.attempts;
            diag["converged"] = res.diag.converged;
            diag["singular_skips"] = res.diag.singular_skips;
            diag["escaped"] = res.diag.escaped;
            diag["divisor_rejects"] = res.diag.divisor_rejects;
            diag["duplicates"] = res.diag.duplicates;
            out["diagnostics"] = diag;
            return out;
        },
        py::arg("sys"), py::arg("a"), py::arg("max_period"), py::arg("grid") = 50,
        py::arg("threads") = 1);

    m.def(
        "verify_covered_domain",
        [](int d, int k, double y_ratio) {
            return certificate_dict(verify_covered_domain(d, k, y_ratio));
        },
        py::arg("d"), py::arg("k"), py::arg("y_ratio") = 2.0 / 3.0);

    m.def(
        "cover_constant_jet",
        [](const SystemSpec& sys, double x0, double y0, int depth) {
            const auto& layout = sys.layout();
            Jet target = Jet::constant(layout.E.d(), layout.E.k(), x0, y0);
            ConstantJetCover cover = cover_constant_jet(sys, target, depth);
            py::dict out;
            out["residual"] = cover.residual;
            out["depth"] = int(cover.symbols.size());
            out["base_x"] = cover.achieved.base_x();
            out["base_y"] = cover.achieved.base_y();
            return out;
        },
        py::arg("sys"), py::arg("x0"), py::arg("y0"), py::arg("depth"));
}
