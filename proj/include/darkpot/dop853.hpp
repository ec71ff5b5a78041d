// Eighth-order Dormand-Prince integrator (the 8(5,3) pair) with the
// seventh-order dense interpolant.  Used for the classical trajectory, where
// long integrations at tight tolerance must also keep the energy drift well
// below the step-control tolerance; the extra order buys exactly that.
//
// Coefficients follow E. Hairer, S.P. Norsett and G. Wanner, "Solving
// Ordinary Differential Equations I", second edition (the DOP853 scheme).

#ifndef DARKPOT_DOP853_HPP
#define DARKPOT_DOP853_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "darkpot/ode.hpp" // IntegratorOptions

namespace darkpot {

template <int N>
struct Dop853Solution {
    using State = std::array<double, N>;

    std::vector<double> t;
    std::vector<State> y;
    std::vector<std::array<State, 8>> rc; // dense vectors per step

    double t_begin() const { return t.front(); }
    double t_end() const { return t.back(); }

    State at(double ti) const {
        if (t.size() == 1) return y.front();
        auto it = std::upper_bound(t.begin(), t.end(), ti);
        std::size_t i = (it == t.begin()) ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
        if (i >= rc.size()) i = rc.size() - 1;
        const double h = t[i + 1] - t[i];
        const double s = std::clamp((ti - t[i]) / h, 0.0, 1.0);
        const double s1 = 1.0 - s;
        State out;
        const auto& r = rc[i];
        for (int k = 0; k < N; ++k)
            out[k] = r[0][k] +
                     s * (r[1][k] +
                          s1 * (r[2][k] +
                                s * (r[3][k] +
                                     s1 * (r[4][k] +
                                           s * (r[5][k] + s1 * (r[6][k] + s * r[7][k]))))));
        return out;
    }
};

namespace dop853_detail {

// clang-format off
inline constexpr double
    c2  = 0.526001519587677318785587544488e-01, c3  = 0.789002279381515978178381316732e-01,
    c4  = 0.118350341907227396726757197510e+00, c5  = 0.281649658092772603273242802490e+00,
    c6  = 0.333333333333333333333333333333e+00, c7  = 0.25e+00,
    c8  = 0.307692307692307692307692307692e+00, c9  = 0.651282051282051282051282051282e+00,
    c10 = 0.6e+00,                              c11 = 0.857142857142857142857142857142e+00,
    c14 = 0.1e+00,                              c15 = 0.2e+00,
    c16 = 0.777777777777777777777777777778e+00,

    b1  =  5.42937341165687622380535766363e-2,  b6  =  4.45031289275240888144113950566e0,
    b7  =  1.89151789931450038304281599044e0,   b8  = -5.8012039600105847814672114227e0,
    b9  =  3.1116436695781989440891606237e-1,   b10 = -1.52160949662516078556178806805e-1,
    b11 =  2.01365400804030348374776537501e-1,  b12 =  4.47106157277725905176885569043e-2,

    a21 = 5.26001519587677318785587544488e-2,
    a31 = 1.97250569845378994544595329183e-2,   a32 = 5.91751709536136983633785987549e-2,
    a41 = 2.95875854768068491816892993775e-2,   a43 = 8.87627564304205475450678981324e-2,
    a51 = 2.41365134159266685502369798665e-1,   a53 = -8.84549479328286085344864962717e-1,
    a54 = 9.24834003261792003115737966543e-1,
    a61 = 3.7037037037037037037037037037e-2,    a64 = 1.70828608729473871279604482173e-1,
    a65 = 1.25467687566822425016691814123e-1,
    a71 = 3.7109375e-2,                         a74 = 1.70252211019544039314978060272e-1,
    a75 = 6.02165389804559606850219397283e-2,   a76 = -1.7578125e-2,
    a81 = 3.70920001185047927108779319836e-2,   a84 = 1.70383925712239993810214054705e-1,
    a85 = 1.07262030446373284651809199168e-1,   a86 = -1.53194377486244017527936158236e-2,
    a87 = 8.27378916381402288758473766002e-3,
    a91 = 6.24110958716075717114429577812e-1,   a94 = -3.36089262944694129406857109825e0,
    a95 = -8.68219346841726006818189891453e-1,  a96 = 2.75920996994467083049415600797e1,
    a97 = 2.01540675504778934086186788979e1,    a98 = -4.34898841810699588477366255144e1,
    a101 = 4.77662536438264365890433908527e-1,  a104 = -2.48811461997166764192642586468e0,
    a105 = -5.90290826836842996371446475743e-1, a106 = 2.12300514481811942347288949897e1,
    a107 = 1.52792336328824235832596922938e1,   a108 = -3.32882109689848629194453265587e1,
    a109 = -2.03312017085086261358222928593e-2,
    a111 = -9.3714243008598732571704021658e-1,  a114 = 5.18637242884406370830023853209e0,
    a115 = 1.09143734899672957818500254654e0,   a116 = -8.14978701074692612513997267357e0,
    a117 = -1.85200656599969598641566180701e1,  a118 = 2.27394870993505042818970056734e1,
    a119 = 2.49360555267965238987089396762e0,   a1110 = -3.0467644718982195003823669022e0,
    a121 = 2.27331014751653820792359768449e0,   a124 = -1.05344954667372501984066689879e1,
    a125 = -2.00087205822486249909675718444e0,  a126 = -1.79589318631187989172765950534e1,
    a127 = 2.79488845294199600508499808837e1,   a128 = -2.85899827713502369474065508674e0,
    a129 = -8.87285693353062954433549289258e0,  a1210 = 1.23605671757943030647266201528e1,
    a1211 = 6.43392746015763530355970484046e-1,

    a141 = 5.61675022830479523392909219681e-2,  a147 = 2.53500210216624811088794765333e-1,
    a148 = -2.46239037470802489917441475441e-1, a149 = -1.24191423263816360469010140626e-1,
    a1410 = 1.5329179827876569731206322685e-1,  a1411 = 8.20105229563468988491666602057e-3,
    a1412 = 7.56789766054569976138603589584e-3, a1413 = -8.298e-3,
    a151 = 3.18346481635021405060768473261e-2,  a156 = 2.83009096723667755288322961402e-2,
    a157 = 5.35419883074385676223797384372e-2,  a158 = -5.49237485713909884646569340306e-2,
    a1511 = -1.08347328697249322858509316994e-4, a1512 = 3.82571090835658412954920192323e-4,
    a1513 = -3.40465008687404560802977114492e-4, a1514 = 1.41312443674632500278074618366e-1,
    a161 = -4.28896301583791923408573538692e-1, a166 = -4.69762141536116384314449447206e0,
    a167 = 7.68342119606259904184240953878e0,   a168 = 4.06898981839711007970213554331e0,
    a169 = 3.56727187455281109270669543021e-1,  a1613 = -1.39902416515901462129418009734e-3,
    a1614 = 2.9475147891527723389556272149e0,   a1615 = -9.15095847217987001081870187138e0,

    bhh1 = 0.244094488188976377952755905512e+00, bhh2 = 0.733846688281611857341361741547e+00,
    bhh3 = 0.220588235294117647058823529412e-01,
    er1 = 0.1312004499419488073250102996e-01,   er6 = -0.1225156446376204440720569753e+01,
    er7 = -0.4957589496572501915214079952e+00,  er8 = 0.1664377182454986536961530415e+01,
    er9 = -0.3503288487499736816886487290e+00,  er10 = 0.3341791187130174790297318841e+00,
    er11 = 0.8192320648511571246570742613e-01,  er12 = -0.2235530786388629525884427845e-01,

    d41 = -0.84289382761090128651353491142e+01, d46 = 0.56671495351937776962531783590e+00,
    d47 = -0.30689499459498916912797304727e+01, d48 = 0.23846676565120698287728149680e+01,
    d49 = 0.21170345824450282767155149946e+01,  d410 = -0.87139158377797299206789907490e+00,
    d411 = 0.22404374302607882758541771650e+01, d412 = 0.63157877876946881815570249290e+00,
    d413 = -0.88990336451333310820698117400e-01, d414 = 0.18148505520854727256656404962e+02,
    d415 = -0.91946323924783554000451984436e+01, d416 = -0.44360363875948939664310572000e+01,
    d51 = 0.10427508642579134603413151009e+02,  d56 = 0.24228349177525818288430175319e+03,
    d57 = 0.16520045171727028198505394887e+03,  d58 = -0.37454675472269020279518312152e+03,
    d59 = -0.22113666853125306036270938578e+02, d510 = 0.77334326684722638389603898808e+01,
    d511 = -0.30674084731089398182061213626e+02, d512 = -0.93321305264302278729567221706e+01,
    d513 = 0.15697238121770843886131091075e+02, d514 = -0.31139403219565177677282850411e+02,
    d515 = -0.93529243588444783865713862664e+01, d516 = 0.35816841486394083752465898540e+02,
    d61 = 0.19985053242002433820987653617e+02,  d66 = -0.38703730874935176555105901742e+03,
    d67 = -0.18917813819516756882830838328e+03, d68 = 0.52780815920542364900561016686e+03,
    d69 = -0.11573902539959630126141871134e+02, d610 = 0.68812326946963000169666922661e+01,
    d611 = -0.10006050966910838403183860980e+01, d612 = 0.77771377980534432092869265740e+00,
    d613 = -0.27782057523535084065932004339e+01, d614 = -0.60196695231264120758267380846e+02,
    d615 = 0.84320405506677161018159903784e+02, d616 = 0.11992291136182789328035130030e+02,
    d71 = -0.25693933462703749003312586129e+02, d76 = -0.15418974869023643374053993627e+03,
    d77 = -0.23152937917604549567536039109e+03, d78 = 0.35763911791061412378285349910e+03,
    d79 = 0.93405324183624310003907691704e+02,  d710 = -0.37458323136451633156875139351e+02,
    d711 = 0.10409964950896230045147246184e+03, d712 = 0.29840293426660503123344363579e+02,
    d713 = -0.43533456590011143754432175058e+02, d714 = 0.96324553959188282948394950600e+02,
    d715 = -0.39177261675615439165231486172e+02, d716 = -0.14972683625798562581422125276e+03;
// clang-format on

} // namespace dop853_detail

/// Integrate with the 8(5,3) pair and per-step dense output; same calling
/// convention as integrate().
template <int N, class Rhs, class Halt>
Dop853Solution<N> integrate_dop853(Rhs&& rhs, std::array<double, N> y0, double t0, double t1,
                                   const IntegratorOptions& opt, Halt&& halt) {
    namespace d = dop853_detail;
    using State = std::array<double, N>;
    if (!(t1 > t0)) throw std::invalid_argument("integrate_dop853: t1 must exceed t0");

    Dop853Solution<N> sol;
    sol.t.push_back(t0);
    sol.y.push_back(y0);

    State k1, k2, k3, k4, k5, k6, k7, k8, k9, k10, ww, ynew;
    double t = t0;
    State y = y0;
    rhs(t, y, k1);

    // initial step: match the error-per-step heuristic of the reference code
    double h = opt.initial_step;
    if (h <= 0.0) {
        double dnf = 0.0, dny = 0.0;
        for (int i = 0; i < N; ++i) {
            const double sk = opt.abs_tol + opt.rel_tol * std::fabs(y[i]);
            dnf += (k1[i] / sk) * (k1[i] / sk);
            dny += (y[i] / sk) * (y[i] / sk);
        }
        h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
        h = std::min(h, t1 - t0);
    }
    h = std::min(h, opt.max_step);

    const double safe = 0.9, fac1 = 1.0 / 3.0, fac2 = 6.0;
    bool rejected = false;
    long nsteps = 0;

    while (t < t1) {
        if (++nsteps > opt.max_steps)
            throw std::runtime_error("integrate_dop853: step limit exceeded");
        h = std::min({h, opt.max_step, t1 - t});
        if (t + h == t) throw std::runtime_error("integrate_dop853: step size underflow");

        for (int i = 0; i < N; ++i) ww[i] = y[i] + h * d::a21 * k1[i];
        rhs(t + d::c2 * h, ww, k2);
        for (int i = 0; i < N; ++i) ww[i] = y[i] + h * (d::a31 * k1[i] + d::a32 * k2[i]);
        rhs(t + d::c3 * h, ww, k3);
        for (int i = 0; i < N; ++i) ww[i] = y[i] + h * (d::a41 * k1[i] + d::a43 * k3[i]);
        rhs(t + d::c4 * h, ww, k4);
        for (int i = 0; i < N; ++i)
            ww[i] = y[i] + h * (d::a51 * k1[i] + d::a53 * k3[i] + d::a54 * k4[i]);
        rhs(t + d::c5 * h, ww, k5);
        for (int i = 0; i < N; ++i)
            ww[i] = y[i] + h * (d::a61 * k1[i] + d::a64 * k4[i] + d::a65 * k5[i]);
        rhs(t + d::c6 * h, ww, k6);
        for (int i = 0; i < N; ++i)
            ww[i] = y[i] + h * (d::a71 * k1[i] + d::a74 * k4[i] + d::a75 * k5[i] + d::a76 * k6[i]);
        rhs(t + d::c7 * h, ww, k7);
        for (int i = 0; i < N; ++i)
            ww[i] = y[i] + h * (d::a81 * k1[i] + d::a84 * k4[i] + d::a85 * k5[i] +
                                d::a86 * k6[i] + d::a87 * k7[i]);
        rhs(t + d::c8 * h, ww, k8);
        for (int i = 0; i < N; ++i)
            ww[i] = y[i] + h * (d::a91 * k1[i] + d::a94 * k4[i] + d::a95 * k5[i] +
                                d::a96 * k6[i] + d::a97 * k7[i] + d::a98 * k8[i]);
        rhs(t + d::c9 * h, ww, k9);
        for (int i = 0; i < N; ++i)
            ww[i] = y[i] + h * (d::a101 * k1[i] + d::a104 * k4[i] + d::a105 * k5[i] +
                                d::a106 * k6[i] + d::a107 * k7[i] + d::a108 * k8[i] +
                                d::a109 * k9[i]);
        rhs(t + d::c10 * h, ww, k10);
        State k11, k12;
        for (int i = 0; i < N; ++i)
            ww[i] = y[i] + h * (d::a111 * k1[i] + d::a114 * k4[i] + d::a115 * k5[i] +
                                d::a116 * k6[i] + d::a117 * k7[i] + d::a118 * k8[i] +
                                d::a119 * k9[i] + d::a1110 * k10[i]);
        rhs(t + d::c11 * h, ww, k11);
        for (int i = 0; i < N; ++i)
            ww[i] = y[i] + h * (d::a121 * k1[i] + d::a124 * k4[i] + d::a125 * k5[i] +
                                d::a126 * k6[i] + d::a127 * k7[i] + d::a128 * k8[i] +
                                d::a129 * k9[i] + d::a1210 * k10[i] + d::a1211 * k11[i]);
        rhs(t + h, ww, k12);

        State ksum;
        for (int i = 0; i < N; ++i) {
            ksum[i] = d::b1 * k1[i] + d::b6 * k6[i] + d::b7 * k7[i] + d::b8 * k8[i] +
                      d::b9 * k9[i] + d::b10 * k10[i] + d::b11 * k11[i] + d::b12 * k12[i];
            ynew[i] = y[i] + h * ksum[i];
        }

        // combined 5th/3rd order error estimate
        double err5 = 0.0, err3 = 0.0;
        for (int i = 0; i < N; ++i) {
            const double sk =
                1.0 / (opt.abs_tol + opt.rel_tol * std::max(std::fabs(y[i]), std::fabs(ynew[i])));
            double sq = ksum[i] - d::bhh1 * k1[i] - d::bhh2 * k9[i] - d::bhh3 * k12[i];
            sq *= sk;
            err3 += sq * sq;
            sq = d::er1 * k1[i] + d::er6 * k6[i] + d::er7 * k7[i] + d::er8 * k8[i] +
                 d::er9 * k9[i] + d::er10 * k10[i] + d::er11 * k11[i] + d::er12 * k12[i];
            sq *= sk;
            err5 += sq * sq;
        }
        double deno = err5 + 0.01 * err3;
        if (deno <= 0.0) deno = 1.0;
        const double err = std::fabs(h) * err5 * std::sqrt(1.0 / (deno * N));

        const double fac11 = std::pow(std::max(err, 1e-32), 0.125);
        double fac = std::max(1.0 / fac2, std::min(1.0 / fac1, fac11 / safe));

        if (err <= 1.0) {
            State knew;
            rhs(t + h, ynew, knew);

            // dense output: contributions from the twelve stages plus the
            // three extra evaluations
            std::array<State, 8> r;
            State s14, s15, s16;
            for (int i = 0; i < N; ++i) {
                r[0][i] = y[i];
                const double ydiff = ynew[i] - y[i];
                r[1][i] = ydiff;
                const double bspl = h * k1[i] - ydiff;
                r[2][i] = bspl;
                r[3][i] = ydiff - h * knew[i] - bspl;
                r[4][i] = d::d41 * k1[i] + d::d46 * k6[i] + d::d47 * k7[i] + d::d48 * k8[i] +
                          d::d49 * k9[i] + d::d410 * k10[i] + d::d411 * k11[i] + d::d412 * k12[i];
                r[5][i] = d::d51 * k1[i] + d::d56 * k6[i] + d::d57 * k7[i] + d::d58 * k8[i] +
                          d::d59 * k9[i] + d::d510 * k10[i] + d::d511 * k11[i] + d::d512 * k12[i];
                r[6][i] = d::d61 * k1[i] + d::d66 * k6[i] + d::d67 * k7[i] + d::d68 * k8[i] +
                          d::d69 * k9[i] + d::d610 * k10[i] + d::d611 * k11[i] + d::d612 * k12[i];
                r[7][i] = d::d71 * k1[i] + d::d76 * k6[i] + d::d77 * k7[i] + d::d78 * k8[i] +
                          d::d79 * k9[i] + d::d710 * k10[i] + d::d711 * k11[i] + d::d712 * k12[i];
            }
            for (int i = 0; i < N; ++i)
                ww[i] = y[i] + h * (d::a141 * k1[i] + d::a147 * k7[i] + d::a148 * k8[i] +
                                    d::a149 * k9[i] + d::a1410 * k10[i] + d::a1411 * k11[i] +
                                    d::a1412 * k12[i] + d::a1413 * knew[i]);
            rhs(t + d::c14 * h, ww, s14);
            for (int i = 0; i < N; ++i)
                ww[i] = y[i] + h * (d::a151 * k1[i] + d::a156 * k6[i] + d::a157 * k7[i] +
                                    d::a158 * k8[i] + d::a1511 * k11[i] + d::a1512 * k12[i] +
                                    d::a1513 * knew[i] + d::a1514 * s14[i]);
            rhs(t + d::c15 * h, ww, s15);
            for (int i = 0; i < N; ++i)
                ww[i] = y[i] + h * (d::a161 * k1[i] + d::a166 * k6[i] + d::a167 * k7[i] +
                                    d::a168 * k8[i] + d::a169 * k9[i] + d::a1613 * knew[i] +
                                    d::a1614 * s14[i] + d::a1615 * s15[i]);
            rhs(t + d::c16 * h, ww, s16);
            for (int i = 0; i < N; ++i) {
                r[4][i] = h * (r[4][i] + d::d413 * knew[i] + d::d414 * s14[i] + d::d415 * s15[i] +
                               d::d416 * s16[i]);
                r[5][i] = h * (r[5][i] + d::d513 * knew[i] + d::d514 * s14[i] + d::d515 * s15[i] +
                               d::d516 * s16[i]);
                r[6][i] = h * (r[6][i] + d::d613 * knew[i] + d::d614 * s14[i] + d::d615 * s15[i] +
                               d::d616 * s16[i]);
                r[7][i] = h * (r[7][i] + d::d713 * knew[i] + d::d714 * s14[i] + d::d715 * s15[i] +
                               d::d716 * s16[i]);
            }
            sol.rc.push_back(r);

            t += h;
            y = ynew;
            k1 = knew;
            sol.t.push_back(t);
            sol.y.push_back(y);

            double hnew = h / fac;
            if (rejected) hnew = std::min(hnew, h);
            rejected = false;
            h = hnew;

            if (halt(sol)) break;
        } else {
            h = h / std::min(1.0 / fac1, fac11 / safe);
            rejected = true;
        }
    }
    return sol;
}

template <int N, class Rhs>
Dop853Solution<N> integrate_dop853(Rhs&& rhs, std::array<double, N> y0, double t0, double t1,
                                   const IntegratorOptions& opt = {}) {
    return integrate_dop853<N>(std::forward<Rhs>(rhs), y0, t0, t1, opt,
                               [](const Dop853Solution<N>&) { return false; });
}

/// Splice a contiguous continuation onto `head` (same contract as append()
/// for the fifth-order solution type).
template <int N>
void append(Dop853Solution<N>& head, const Dop853Solution<N>& tail) {
    if (tail.t.empty() || tail.rc.empty()) return;
    if (std::fabs(tail.t.front() - head.t_end()) >
        1e-12 * std::max(1.0, std::fabs(head.t_end())))
        throw std::logic_error("append: segments are not contiguous");
    head.t.insert(head.t.end(), tail.t.begin() + 1, tail.t.end());
    head.y.insert(head.y.end(), tail.y.begin() + 1, tail.y.end());
    head.rc.insert(head.rc.end(), tail.rc.begin(), tail.rc.end());
}

} // namespace darkpot

#endif
