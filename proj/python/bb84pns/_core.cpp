#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bb84pns/approx.hpp"
#include "bb84pns/attack.hpp"
#include "bb84pns/errors.hpp"
#include "bb84pns/model.hpp"
#include "bb84pns/montecarlo.hpp"
#include "bb84pns/optimize.hpp"

namespace py = pybind11;
using namespace bb84pns;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Security of practical BB84 against photon-number-splitting and "
              "2->3 cloning attacks";
    m.attr("__version__") = "1.0.0";
    m.attr("cloner_c_d2") = cloner_c_d2;
    m.attr("feasibility_tol") = feasibility_tol;

    // exceptions; subclasses registered after the base so they translate first
    auto base = py::register_exception<InfeasibleError>(m, "InfeasibleError");
    py::register_exception<InfeasibleChannelError>(m, "InfeasibleChannelError", base);
    py::register_exception<NoFeasibleAttackError>(m, "NoFeasibleAttackError", base);
    py::register_exception<InfeasibleAttackError>(m, "InfeasibleAttackError", base);
    py::register_exception<ApproxInfeasibleError>(m, "ApproxInfeasibleError", base);
    py::register_exception<NoCountsError>(m, "NoCountsError");

    m.def("binary_entropy", &binary_entropy, py::arg("p"));
    m.def("transmission", &transmission, py::arg("alpha_db_per_km"), py::arg("distance_km"));

    py::enum_<SourceKind>(m, "SourceKind")
        .value("Poissonian", SourceKind::Poissonian)
        .value("Custom", SourceKind::Custom);

    py::class_<SourceModel>(m, "SourceModel")
        .def_static("poissonian", &SourceModel::poissonian, py::arg("mu"),
                    py::arg("n_max") = SourceModel::default_n_max)
        .def_static("custom", &SourceModel::custom, py::arg("probs"),
                    py::arg("n_max") = SourceModel::default_n_max)
        .def_property_readonly("kind", &SourceModel::kind)
        .def_property_readonly("mu", &SourceModel::mu)
        .def_property_readonly("g2", &SourceModel::g2)
        .def_property_readonly("n_max", &SourceModel::n_max)
        .def_property_readonly("probs", &SourceModel::probs)
        .def("p", &SourceModel::p, py::arg("n"));

    py::class_<ChannelParams>(m, "ChannelParams")
        .def(py::init<double, double, double>(), py::arg("alpha_db_per_km"),
             py::arg("distance_km"), py::arg("visibility"))
        .def_readonly("alpha", &ChannelParams::alpha)
        .def_readonly("d", &ChannelParams::d)
        .def_readonly("v", &ChannelParams::v)
        .def_property_readonly("t", &ChannelParams::t);

    py::class_<DetectorParams>(m, "DetectorParams")
        .def(py::init<double, double>(), py::arg("eta"), py::arg("p_d"))
        .def_readonly("eta", &DetectorParams::eta)
        .def_readonly("p_d", &DetectorParams::p_d);

    py::class_<LinkRates>(m, "LinkRates")
        .def_readonly("p_b0", &LinkRates::p_b0)
        .def_readonly("c_right", &LinkRates::c_right)
        .def_readonly("c_wrong", &LinkRates::c_wrong)
        .def_readonly("q", &LinkRates::q)
        .def_readonly("i_ab", &LinkRates::i_ab);

    m.def("p_empty", &p_empty, py::arg("source"), py::arg("t"), py::arg("eta"));
    m.def("link_rates", &link_rates, py::arg("source"), py::arg("channel"),
          py::arg("detector"));

    py::enum_<ClonerKind>(m, "ClonerKind")
        .value("NoCloner", ClonerKind::None) // "None" is reserved in Python
        .value("ClonerA", ClonerKind::ClonerA)
        .value("ClonerC", ClonerKind::ClonerC);

    m.def("i1", &i1, py::arg("d1"));
    m.def("i2_cloner_a", &i2_cloner_a, py::arg("d2"));
    m.def("i2", &i2, py::arg("cloner"), py::arg("d2"));

    py::class_<AttackStrategy>(m, "AttackStrategy")
        .def(py::init<ClonerKind, double, double, double, double, double, double, double,
                      double>(),
             py::arg("cloner"), py::arg("p_c1"), py::arg("p_b1"), py::arg("p_l1"),
             py::arg("d1"), py::arg("p_s2"), py::arg("p_c2"), py::arg("p_b2"),
             py::arg("d2"))
        .def_readonly("cloner", &AttackStrategy::cloner)
        .def_readonly("p_c1", &AttackStrategy::p_c1)
        .def_readonly("p_b1", &AttackStrategy::p_b1)
        .def_readonly("p_l1", &AttackStrategy::p_l1)
        .def_readonly("d1", &AttackStrategy::d1)
        .def_readonly("p_s2", &AttackStrategy::p_s2)
        .def_readonly("p_c2", &AttackStrategy::p_c2)
        .def_readonly("p_b2", &AttackStrategy::p_b2)
        .def_readonly("d2", &AttackStrategy::d2);

    py::class_<EveRates>(m, "EveRates")
        .def_readonly("r1", &EveRates::r1)
        .def_readonly("r2s", &EveRates::r2s)
        .def_readonly("r2c", &EveRates::r2c)
        .def_readonly("r3", &EveRates::r3)
        .def_readonly("r_pass", &EveRates::r_pass)
        .def_readonly("i_ae", &EveRates::i_ae);

    m.def("eve_rates", &eve_rates, py::arg("source"), py::arg("detector"),
          py::arg("attack"));
    m.def("constraint_residuals", &constraint_residuals, py::arg("source"),
          py::arg("channel"), py::arg("detector"), py::arg("attack"));
    m.def("secret_key_rate", &secret_key_rate, py::arg("source"), py::arg("channel"),
          py::arg("detector"), py::arg("attack"));
    m.def("reverse_reconciliation_factor", &reverse_reconciliation_factor, py::arg("n"),
          py::arg("detector"));
    m.def("cl_reference_mu", &cl_reference_mu, py::arg("eta"));

    py::class_<SecurityPoint>(m, "SecurityPoint")
        .def_readonly("d", &SecurityPoint::d)
        .def_readonly("v", &SecurityPoint::v)
        .def_readonly("mu", &SecurityPoint::mu)
        .def_readonly("attack", &SecurityPoint::attack)
        .def_readonly("q", &SecurityPoint::q)
        .def_readonly("i_ab", &SecurityPoint::i_ab)
        .def_readonly("i_ae", &SecurityPoint::i_ae)
        .def_readonly("s", &SecurityPoint::s);

    py::class_<OptimalMu>(m, "OptimalMu")
        .def_readonly("mu_star", &OptimalMu::mu_star)
        .def_readonly("point", &OptimalMu::point)
        .def_readonly("insecure", &OptimalMu::insecure);

    py::class_<ScanResult>(m, "ScanResult")
        .def_readonly("points", &ScanResult::points)
        .def_readonly("cloner", &ScanResult::cloner)
        .def_readonly("alpha", &ScanResult::alpha)
        .def_readonly("detector", &ScanResult::detector);

    m.def("optimize_attack", &optimize_attack, py::arg("source"), py::arg("channel"),
          py::arg("detector"), py::arg("cloner"));
    m.def("grid_oracle", &grid_oracle, py::arg("source"), py::arg("channel"),
          py::arg("detector"), py::arg("cloner"), py::arg("resolution"));
    m.def("make_security_point", &make_security_point, py::arg("source"),
          py::arg("channel"), py::arg("detector"), py::arg("attack"));
    m.def("optimize_mu", &optimize_mu, py::arg("distance_km"), py::arg("alpha"),
          py::arg("detector"), py::arg("visibility"), py::arg("cloner"));
    m.def("scan_distance", &scan_distance, py::arg("d_min"), py::arg("d_max"),
          py::arg("step"), py::arg("alpha"), py::arg("detector"), py::arg("visibility"),
          py::arg("cloner"));
    m.def("scan_visibility", &scan_visibility, py::arg("distance_km"), py::arg("v_min"),
          py::arg("v_max"), py::arg("step"), py::arg("alpha"), py::arg("detector"),
          py::arg("cloner"));

    py::class_<ApproxParams>(m, "ApproxParams")
        .def(py::init<double, double, double, double, double>(), py::arg("t"),
             py::arg("eta"), py::arg("p_d"), py::arg("g2"), py::arg("v"))
        .def_readonly("t", &ApproxParams::t)
        .def_readonly("eta", &ApproxParams::eta)
        .def_readonly("p_d", &ApproxParams::p_d)
        .def_readonly("g2", &ApproxParams::g2)
        .def_readonly("v", &ApproxParams::v);

    m.def("s_of_mu", &s_of_mu, py::arg("mu"), py::arg("params"));
    m.def("mu_star_approx", &mu_star_approx, py::arg("params"));
    m.def("s_approx", &s_approx, py::arg("params"));
    m.def("s_near_perfect_v", &s_near_perfect_v, py::arg("eps"), py::arg("t"),
          py::arg("eta"), py::arg("g2"));

    py::class_<TransmissionLimit>(m, "TransmissionLimit")
        .def_readonly("t_lim", &TransmissionLimit::t_lim)
        .def_readonly("d_lim", &TransmissionLimit::d_lim)
        .def_readonly("unbounded", &TransmissionLimit::unbounded);

    m.def("t_limit", &t_limit, py::arg("eta"), py::arg("p_d"), py::arg("g2"),
          py::arg("alpha"));

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init([](long long n_pulses, std::uint64_t seed, const SourceModel& src,
                         const ChannelParams& ch, const DetectorParams& det) {
                 return SimConfig{n_pulses, seed, src, ch, det};
             }),
             py::arg("n_pulses"), py::arg("seed"), py::arg("source"), py::arg("channel"),
             py::arg("detector"))
        .def_readonly("n_pulses", &SimConfig::n_pulses)
        .def_readonly("seed", &SimConfig::seed)
        .def_readonly("source", &SimConfig::source)
        .def_readonly("channel", &SimConfig::channel)
        .def_readonly("detector", &SimConfig::detector);

    py::class_<SimResult>(m, "SimResult")
        .def_readonly("n_pulses", &SimResult::n_pulses)
        .def_readonly("n_right", &SimResult::n_right)
        .def_readonly("n_wrong", &SimResult::n_wrong)
        .def_readonly("n_arrived", &SimResult::n_arrived)
        .def_readonly("c_right_hat", &SimResult::c_right_hat)
        .def_readonly("c_wrong_hat", &SimResult::c_wrong_hat)
        .def_readonly("c_right_se", &SimResult::c_right_se)
        .def_readonly("c_wrong_se", &SimResult::c_wrong_se)
        .def_readonly("q_hat", &SimResult::q_hat)
        .def_readonly("q_se", &SimResult::q_se)
        .def_readonly("arrived_hat", &SimResult::arrived_hat)
        .def_readonly("arrived_se", &SimResult::arrived_se);

    m.def("simulate_link", &simulate_link, py::arg("config"));
}
