#pragma once

// Dormand-Prince 8(5,3) stepper with 7th-order dense output for 4-dimensional
// autonomous or non-autonomous systems. Coefficients from Hairer's dop853.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace ecotrace {

namespace dop853_coef {
constexpr double c2 = 0.526001519587677318785587544488e-01;
constexpr double c3 = 0.789002279381515978178381316732e-01;
constexpr double c4 = 0.118350341907227396726757197510e+00;
constexpr double c5 = 0.281649658092772603273242802490e+00;
constexpr double c6 = 0.333333333333333333333333333333e+00;
constexpr double c7 = 0.25e+00;
constexpr double c8 = 0.307692307692307692307692307692e+00;
constexpr double c9 = 0.651282051282051282051282051282e+00;
constexpr double c10 = 0.6e+00;
constexpr double c11 = 0.857142857142857142857142857142e+00;
constexpr double c14 = 0.1e+00;
constexpr double c15 = 0.2e+00;
constexpr double c16 = 0.777777777777777777777777777778e+00;

constexpr double a21 = 5.26001519587677318785587544488e-2;
constexpr double a31 = 1.97250569845378994544595329183e-2;
constexpr double a32 = 5.91751709536136983633785987549e-2;
constexpr double a41 = 2.95875854768068491816892993775e-2;
constexpr double a43 = 8.87627564304205475450678981324e-2;
constexpr double a51 = 2.41365134159266685502369798665e-1;
constexpr double a53 = -8.84549479328286085344864962717e-1;
constexpr double a54 = 9.24834003261792003115737966543e-1;
constexpr double a61 = 3.7037037037037037037037037037e-2;
constexpr double a64 = 1.70828608729473871279604482173e-1;
constexpr double a65 = 1.25467687566822425016691814123e-1;
constexpr double a71 = 3.7109375e-2;
constexpr double a74 = 1.70252211019544039314978060272e-1;
constexpr double a75 = 6.02165389804559606850219397283e-2;
constexpr double a76 = -1.7578125e-2;
constexpr double a81 = 3.70920001185047927108779319836e-2;
constexpr double a84 = 1.70383925712239993810214054705e-1;
constexpr double a85 = 1.07262030446373284651809199168e-1;
constexpr double a86 = -1.53194377486244017527936158236e-2;
constexpr double a87 = 8.27378916381402288758473766002e-3;
constexpr double a91 = 6.24110958716075717114429577812e-1;
constexpr double a94 = -3.36089262944694129406857109825e0;
constexpr double a95 = -8.68219346841726006818189891453e-1;
constexpr double a96 = 2.75920996994467083049415600797e1;
constexpr double a97 = 2.01540675504778934086186788979e1;
constexpr double a98 = -4.34898841810699588477366255144e1;
constexpr double a101 = 4.77662536438264365890433908527e-1;
constexpr double a104 = -2.48811461997166764192642586468e0;
constexpr double a105 = -5.90290826836842996371446475743e-1;
constexpr double a106 = 2.12300514481811942347288949897e1;
constexpr double a107 = 1.52792336328824235832596922938e1;
constexpr double a108 = -3.32882109689848629194453265587e1;
constexpr double a109 = -2.03312017085086261358222928593e-2;
constexpr double a111 = -9.3714243008598732571704021658e-1;
constexpr double a114 = 5.18637242884406370830023853209e0;
constexpr double a115 = 1.09143734899672957818500254654e0;
constexpr double a116 = -8.14978701074692612513997267357e0;
constexpr double a117 = -1.85200656599969598641566180701e1;
constexpr double a118 = 2.27394870993505042818970056734e1;
constexpr double a119 = 2.49360555267965238987089396762e0;
constexpr double a1110 = -3.0467644718982195003823669022e0;
constexpr double a121 = 2.27331014751653820792359768449e0;
constexpr double a124 = -1.05344954667372501984066689879e1;
constexpr double a125 = -2.00087205822486249909675718444e0;
constexpr double a126 = -1.79589318631187989172765950534e1;
constexpr double a127 = 2.79488845294199600508499808837e1;
constexpr double a128 = -2.85899827713502369474065508674e0;
constexpr double a129 = -8.87285693353062954433549289258e0;
constexpr double a1210 = 1.23605671757943030647266201528e1;
constexpr double a1211 = 6.43392746015763530355970484046e-1;

constexpr double a141 = 5.61675022830479523392909219681e-2;
constexpr double a147 = 2.53500210216624811088794765333e-1;
constexpr double a148 = -2.46239037470802489917441475441e-1;
constexpr double a149 = -1.24191423263816360469010140626e-1;
constexpr double a1410 = 1.5329179827876569731206322685e-1;
constexpr double a1411 = 8.20105229563468988491666602057e-3;
constexpr double a1412 = 7.56789766054569976138603589584e-3;
constexpr double a1413 = -8.298e-3;
constexpr double a151 = 3.18346481635021405060768473261e-2;
constexpr double a156 = 2.83009096723667755288322961402e-2;
constexpr double a157 = 5.35419883074385676223797384372e-2;
constexpr double a158 = -5.49237485713909884646569340306e-2;
constexpr double a1511 = -1.08347328697249322858509316994e-4;
constexpr double a1512 = 3.82571090835658412954920192323e-4;
constexpr double a1513 = -3.40465008687404560802977114492e-4;
constexpr double a1514 = 1.41312443674632500278074618366e-1;
constexpr double a161 = -4.28896301583791923408573538692e-1;
constexpr double a166 = -4.69762141536116384314449447206e0;
constexpr double a167 = 7.68342119606259904184240953878e0;
constexpr double a168 = 4.06898981839711007970213554331e0;
constexpr double a169 = 3.56727187455281109270669543021e-1;
constexpr double a1613 = -1.39902416515901462129418009734e-3;
constexpr double a1614 = 2.9475147891527723389556272149e0;
constexpr double a1615 = -9.15095847217987001081870187138e0;

constexpr double b1 = 5.42937341165687622380535766363e-2;
constexpr double b6 = 4.45031289275240888144113950566e0;
constexpr double b7 = 1.89151789931450038304281599044e0;
constexpr double b8 = -5.8012039600105847814672114227e0;
constexpr double b9 = 3.1116436695781989440891606237e-1;
constexpr double b10 = -1.52160949662516078556178806805e-1;
constexpr double b11 = 2.01365400804030348374776537501e-1;
constexpr double b12 = 4.47106157277725905176885569043e-2;

constexpr double bhh1 = 0.244094488188976377952755905512e+00;
constexpr double bhh2 = 0.733846688281611857341361741547e+00;
constexpr double bhh3 = 0.220588235294117647058823529412e-01;

constexpr double er1 = 0.1312004499419488073250102996e-01;
constexpr double er6 = -0.1225156446376204440720569753e+01;
constexpr double er7 = -0.4957589496572501915214079952e+00;
constexpr double er8 = 0.1664377182454986536961530415e+01;
constexpr double er9 = -0.3503288487499736816886487290e+00;
constexpr double er10 = 0.3341791187130174790297318841e+00;
constexpr double er11 = 0.8192320648511571246570742613e-01;
constexpr double er12 = -0.2235530786388629525884427845e-01;

constexpr double d41 = -0.84289382761090128651353491142e+01;
constexpr double d46 = 0.56671495351937776962531783590e+00;
constexpr double d47 = -0.30689499459498916912797304727e+01;
constexpr double d48 = 0.23846676565120698287728149680e+01;
constexpr double d49 = 0.21170345824450282767155149946e+01;
constexpr double d410 = -0.87139158377797299206789907490e+00;
constexpr double d411 = 0.22404374302607882758541771650e+01;
constexpr double d412 = 0.63157877876946881815570249290e+00;
constexpr double d413 = -0.88990336451333310820698117400e-01;
constexpr double d414 = 0.18148505520854727256656404962e+02;
constexpr double d415 = -0.91946323924783554000451984436e+01;
constexpr double d416 = -0.44360363875948939664310572000e+01;
constexpr double d51 = 0.10427508642579134603413151009e+02;
constexpr double d56 = 0.24228349177525818288430175319e+03;
constexpr double d57 = 0.16520045171727028198505394887e+03;
constexpr double d58 = -0.37454675472269020279518312152e+03;
constexpr double d59 = -0.22113666853125306036270938578e+02;
constexpr double d510 = 0.77334326684722638389603898808e+01;
constexpr double d511 = -0.30674084731089398182061213626e+02;
constexpr double d512 = -0.93321305264302278729567221706e+01;
constexpr double d513 = 0.15697238121770843886131091075e+02;
constexpr double d514 = -0.31139403219565177677282850411e+02;
constexpr double d515 = -0.93529243588444783865713862664e+01;
constexpr double d516 = 0.35816841486394083752465898540e+02;
constexpr double d61 = 0.19985053242002433820987653617e+02;
constexpr double d66 = -0.38703730874935176555105901742e+03;
constexpr double d67 = -0.18917813819516756882830838328e+03;
constexpr double d68 = 0.52780815920542364900561016686e+03;
constexpr double d69 = -0.11573902539959630126141871134e+02;
constexpr double d610 = 0.68812326946963000169666922661e+01;
constexpr double d611 = -0.10006050966910838403183860980e+01;
constexpr double d612 = 0.77771377980534432092869265740e+00;
constexpr double d613 = -0.27782057523535084065932004339e+01;
constexpr double d614 = -0.60196695231264120758267380846e+02;
constexpr double d615 = 0.84320405506677161018159903784e+02;
constexpr double d616 = 0.11992291136182789328035130030e+02;
constexpr double d71 = -0.25693933462703749003312586129e+02;
constexpr double d76 = -0.15418974869023643374053993627e+03;
constexpr double d77 = -0.23152937917604549567536039109e+03;
constexpr double d78 = 0.35763911791061412378285349910e+03;
constexpr double d79 = 0.93405324183624310003907691704e+02;
constexpr double d710 = -0.37458323136451633156875139351e+02;
constexpr double d711 = 0.10409964950896230045147246184e+03;
constexpr double d712 = 0.29840293426660503123344363579e+02;
constexpr double d713 = -0.43533456590011143754432175058e+02;
constexpr double d714 = 0.96324553959188282948394950600e+02;
constexpr double d715 = -0.39177261675615439165231486172e+02;
constexpr double d716 = -0.14972683625798562581422125276e+03;
}  // namespace dop853_coef

struct Dop853Options {
  double rtol = 1e-12;
  double atol = 1e-12;
  double h_init = 0.0;  // 0: automatic
  double h_max = std::numeric_limits<double>::infinity();
  double safety = 0.9;
  double fac_min = 0.333;
  double fac_max = 6.0;
  double beta = 0.04;
};

enum class StepStatus { accepted, underflow, nonfinite };

/// Adaptive stepper. `Field` is callable as Vec4(double s, const Vec4& y).
/// The direction of integration is given by the sign of `dir`.
template <class Field>
class Dop853 {
 public:
  using Vec = std::array<double, 4>;
  static constexpr int n = 4;

  Dop853(Field field, double s0, const Vec& y0, double dir, const Dop853Options& opt)
      : f_(std::move(field)), opt_(opt), s_(s0), y_(y0), dir_(dir < 0 ? -1.0 : 1.0) {
    k1_ = f_(s_, y_);
    ++nfev_;
    h_ = opt_.h_init > 0 ? dir_ * opt_.h_init : dir_ * initial_step();
  }

  double s() const noexcept { return s_; }
  const Vec& y() const noexcept { return y_; }
  const Vec& dy() const noexcept { return k1_; }
  double s_prev() const noexcept { return s_old_; }
  const Vec& y_prev() const noexcept { return y_old_; }
  double step_size() const noexcept { return h_; }
  long evaluations() const noexcept { return nfev_; }
  long rejected() const noexcept { return nrej_; }

  /// Overwrites the current state (e.g. after a projection) and refreshes
  /// the derivative. Dense output of the last step is left untouched.
  void replace_state(const Vec& y) {
    y_ = y;
    k1_ = f_(s_, y_);
    ++nfev_;
  }

  /// Takes one accepted step without passing `s_end`.
  StepStatus step(double s_end) {
    using namespace dop853_coef;
    const double expo = 0.125 - opt_.beta * 0.2;
    bool last_rejected = false;
    for (;;) {
      double h = h_;
      if (std::abs(h) > opt_.h_max) h = dir_ * opt_.h_max;
      bool clipped = false;
      if (dir_ * (s_ + h - s_end) > 0) {
        h = s_end - s_;
        clipped = true;
      }
      if (std::abs(h) <= 10.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(s_)))
        return StepStatus::underflow;

      Vec y1, k2, k3, k4, k5, k6, k7, k8, k9, k10, k11, k12;
      const Vec& y = y_;
      const Vec& k1 = k1_;
      for (int i = 0; i < n; ++i) y1[i] = y[i] + h * a21 * k1[i];
      k2 = f_(s_ + c2 * h, y1);
      for (int i = 0; i < n; ++i) y1[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
      k3 = f_(s_ + c3 * h, y1);
      for (int i = 0; i < n; ++i) y1[i] = y[i] + h * (a41 * k1[i] + a43 * k3[i]);
      k4 = f_(s_ + c4 * h, y1);
      for (int i = 0; i < n; ++i) y1[i] = y[i] + h * (a51 * k1[i] + a53 * k3[i] + a54 * k4[i]);
      k5 = f_(s_ + c5 * h, y1);
      for (int i = 0; i < n; ++i) y1[i] = y[i] + h * (a61 * k1[i] + a64 * k4[i] + a65 * k5[i]);
      k6 = f_(s_ + c6 * h, y1);
      for (int i = 0; i < n; ++i)
        y1[i] = y[i] + h * (a71 * k1[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
      k7 = f_(s_ + c7 * h, y1);
      for (int i = 0; i < n; ++i)
        y1[i] = y[i] + h * (a81 * k1[i] + a84 * k4[i] + a85 * k5[i] + a86 * k6[i] + a87 * k7[i]);
      k8 = f_(s_ + c8 * h, y1);
      for (int i = 0; i < n; ++i)
        y1[i] = y[i] + h * (a91 * k1[i] + a94 * k4[i] + a95 * k5[i] + a96 * k6[i] +
                            a97 * k7[i] + a98 * k8[i]);
      k9 = f_(s_ + c9 * h, y1);
      for (int i = 0; i < n; ++i)
        y1[i] = y[i] + h * (a101 * k1[i] + a104 * k4[i] + a105 * k5[i] + a106 * k6[i] +
                            a107 * k7[i] + a108 * k8[i] + a109 * k9[i]);
      k10 = f_(s_ + c10 * h, y1);
      for (int i = 0; i < n; ++i)
        y1[i] = y[i] + h * (a111 * k1[i] + a114 * k4[i] + a115 * k5[i] + a116 * k6[i] +
                            a117 * k7[i] + a118 * k8[i] + a119 * k9[i] + a1110 * k10[i]);
      k11 = f_(s_ + c11 * h, y1);
      for (int i = 0; i < n; ++i)
        y1[i] = y[i] + h * (a121 * k1[i] + a124 * k4[i] + a125 * k5[i] + a126 * k6[i] +
                            a127 * k7[i] + a128 * k8[i] + a129 * k9[i] + a1210 * k10[i] +
                            a1211 * k11[i]);
      const double s_new = clipped ? s_end : s_ + h;
      k12 = f_(s_new, y1);
      nfev_ += 11;

      Vec incr, y_new;
      double err3 = 0, err5 = 0;
      bool finite = true;
      for (int i = 0; i < n; ++i) {
        incr[i] = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] +
                  b10 * k10[i] + b11 * k11[i] + b12 * k12[i];
        y_new[i] = y[i] + h * incr[i];
        if (!std::isfinite(y_new[i])) finite = false;
        const double sk = opt_.atol + opt_.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        const double e3 = incr[i] - bhh1 * k1[i] - bhh2 * k9[i] - bhh3 * k12[i];
        const double e5 = er1 * k1[i] + er6 * k6[i] + er7 * k7[i] + er8 * k8[i] + er9 * k9[i] +
                          er10 * k10[i] + er11 * k11[i] + er12 * k12[i];
        err3 += (e3 / sk) * (e3 / sk);
        err5 += (e5 / sk) * (e5 / sk);
      }
      double deno = err5 + 0.01 * err3;
      if (deno <= 0.0) deno = 1.0;
      double err = std::abs(h) * err5 * std::sqrt(1.0 / (n * deno));
      if (!finite || !std::isfinite(err)) {
        ++nrej_;
        h_ = h * 0.25;
        if (std::abs(h_) < 1e-300) return StepStatus::nonfinite;
        last_rejected = true;
        continue;
      }

      const double fac11 = std::pow(err, expo);
      if (err <= 1.0) {
        double fac = fac11 / std::pow(facold_, opt_.beta);
        fac = std::clamp(fac / opt_.safety, 1.0 / opt_.fac_max, 1.0 / opt_.fac_min);
        double h_next = h / fac;
        if (last_rejected) h_next = dir_ * std::min(std::abs(h_next), std::abs(h));
        facold_ = std::max(err, 1e-4);

        const Vec k13 = f_(s_new, y_new);
        ++nfev_;
        // dense output
        for (int i = 0; i < n; ++i) {
          rc_[0][i] = y[i];
          const double ydiff = y_new[i] - y[i];
          rc_[1][i] = ydiff;
          const double bspl = h * k1[i] - ydiff;
          rc_[2][i] = bspl;
          rc_[3][i] = ydiff - h * k13[i] - bspl;
          rc_[4][i] = d41 * k1[i] + d46 * k6[i] + d47 * k7[i] + d48 * k8[i] + d49 * k9[i] +
                      d410 * k10[i] + d411 * k11[i] + d412 * k12[i];
          rc_[5][i] = d51 * k1[i] + d56 * k6[i] + d57 * k7[i] + d58 * k8[i] + d59 * k9[i] +
                      d510 * k10[i] + d511 * k11[i] + d512 * k12[i];
          rc_[6][i] = d61 * k1[i] + d66 * k6[i] + d67 * k7[i] + d68 * k8[i] + d69 * k9[i] +
                      d610 * k10[i] + d611 * k11[i] + d612 * k12[i];
          rc_[7][i] = d71 * k1[i] + d76 * k6[i] + d77 * k7[i] + d78 * k8[i] + d79 * k9[i] +
                      d710 * k10[i] + d711 * k11[i] + d712 * k12[i];
        }
        Vec k14, k15, k16;
        for (int i = 0; i < n; ++i)
          y1[i] = y[i] + h * (a141 * k1[i] + a147 * k7[i] + a148 * k8[i] + a149 * k9[i] +
                              a1410 * k10[i] + a1411 * k11[i] + a1412 * k12[i] + a1413 * k13[i]);
        k14 = f_(s_ + c14 * h, y1);
        for (int i = 0; i < n; ++i)
          y1[i] = y[i] + h * (a151 * k1[i] + a156 * k6[i] + a157 * k7[i] + a158 * k8[i] +
                              a1511 * k11[i] + a1512 * k12[i] + a1513 * k13[i] + a1514 * k14[i]);
        k15 = f_(s_ + c15 * h, y1);
        for (int i = 0; i < n; ++i)
          y1[i] = y[i] + h * (a161 * k1[i] + a166 * k6[i] + a167 * k7[i] + a168 * k8[i] +
                              a169 * k9[i] + a1613 * k13[i] + a1614 * k14[i] + a1615 * k15[i]);
        k16 = f_(s_ + c16 * h, y1);
        nfev_ += 3;
        for (int i = 0; i < n; ++i) {
          rc_[4][i] = h * (rc_[4][i] + d413 * k13[i] + d414 * k14[i] + d415 * k15[i] + d416 * k16[i]);
          rc_[5][i] = h * (rc_[5][i] + d513 * k13[i] + d514 * k14[i] + d515 * k15[i] + d516 * k16[i]);
          rc_[6][i] = h * (rc_[6][i] + d613 * k13[i] + d614 * k14[i] + d615 * k15[i] + d616 * k16[i]);
          rc_[7][i] = h * (rc_[7][i] + d713 * k13[i] + d714 * k14[i] + d715 * k15[i] + d716 * k16[i]);
        }

        s_old_ = s_;
        y_old_ = y_;
        hlast_ = s_new - s_;
        s_ = s_new;
        y_ = y_new;
        k1_ = k13;
        if (!clipped || std::abs(h_next) < std::abs(h_)) h_ = h_next;
        ++nacc_;
        return StepStatus::accepted;
      }
      // rejected
      h_ = h / std::min(1.0 / opt_.fac_min, fac11 / opt_.safety);
      ++nrej_;
      last_rejected = true;
    }
  }

  /// Eighth-order solution at s inside the last step, from a fresh step of
  /// length s - s_prev without error control. More accurate than dense().
  Vec solution_at(double s) {
    using namespace dop853_coef;
    const double h = s - s_old_;
    if (h == 0.0) return y_old_;
    const Vec& y = y_old_;
    Vec y1, k1 = f_(s_old_, y), k2, k3, k4, k5, k6, k7, k8, k9, k10, k11, k12;
    const double s0 = s_old_;
    for (int i = 0; i < n; ++i) y1[i] = y[i] + h * a21 * k1[i];
    k2 = f_(s0 + c2 * h, y1);
    for (int i = 0; i < n; ++i) y1[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = f_(s0 + c3 * h, y1);
    for (int i = 0; i < n; ++i) y1[i] = y[i] + h * (a41 * k1[i] + a43 * k3[i]);
    k4 = f_(s0 + c4 * h, y1);
    for (int i = 0; i < n; ++i) y1[i] = y[i] + h * (a51 * k1[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = f_(s0 + c5 * h, y1);
    for (int i = 0; i < n; ++i) y1[i] = y[i] + h * (a61 * k1[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = f_(s0 + c6 * h, y1);
    for (int i = 0; i < n; ++i)
      y1[i] = y[i] + h * (a71 * k1[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    k7 = f_(s0 + c7 * h, y1);
    for (int i = 0; i < n; ++i)
      y1[i] = y[i] + h * (a81 * k1[i] + a84 * k4[i] + a85 * k5[i] + a86 * k6[i] + a87 * k7[i]);
    k8 = f_(s0 + c8 * h, y1);
    for (int i = 0; i < n; ++i)
      y1[i] = y[i] + h * (a91 * k1[i] + a94 * k4[i] + a95 * k5[i] + a96 * k6[i] +
                          a97 * k7[i] + a98 * k8[i]);
    k9 = f_(s0 + c9 * h, y1);
    for (int i = 0; i < n; ++i)
      y1[i] = y[i] + h * (a101 * k1[i] + a104 * k4[i] + a105 * k5[i] + a106 * k6[i] +
                          a107 * k7[i] + a108 * k8[i] + a109 * k9[i]);
    k10 = f_(s0 + c10 * h, y1);
    for (int i = 0; i < n; ++i)
      y1[i] = y[i] + h * (a111 * k1[i] + a114 * k4[i] + a115 * k5[i] + a116 * k6[i] +
                          a117 * k7[i] + a118 * k8[i] + a119 * k9[i] + a1110 * k10[i]);
    k11 = f_(s0 + c11 * h, y1);
    for (int i = 0; i < n; ++i)
      y1[i] = y[i] + h * (a121 * k1[i] + a124 * k4[i] + a125 * k5[i] + a126 * k6[i] +
                          a127 * k7[i] + a128 * k8[i] + a129 * k9[i] + a1210 * k10[i] +
                          a1211 * k11[i]);
    k12 = f_(s, y1);
    nfev_ += 12;
    Vec out;
    for (int i = 0; i < n; ++i)
      out[i] = y[i] + h * (b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] +
                           b10 * k10[i] + b11 * k11[i] + b12 * k12[i]);
    return out;
  }

  /// Dense output on the last accepted step [s_prev, s].
  Vec dense(double s) const noexcept {
    const double th = (s - s_old_) / hlast_;
    const double th1 = 1.0 - th;
    Vec out;
    for (int i = 0; i < n; ++i) {
      const double a =
          rc_[4][i] + th * (rc_[5][i] + th1 * (rc_[6][i] + th * rc_[7][i]));
      out[i] = rc_[0][i] + th * (rc_[1][i] + th1 * (rc_[2][i] + th * (rc_[3][i] + th1 * a)));
    }
    return out;
  }

  /// Single component of the dense output.
  double dense_component(double s, int i) const noexcept {
    const double th = (s - s_old_) / hlast_;
    const double th1 = 1.0 - th;
    const double a = rc_[4][i] + th * (rc_[5][i] + th1 * (rc_[6][i] + th * rc_[7][i]));
    return rc_[0][i] + th * (rc_[1][i] + th1 * (rc_[2][i] + th * (rc_[3][i] + th1 * a)));
  }

 private:
  double initial_step() {
    // Hairer's hinit for order 8
    double dnf = 0, dny = 0;
    for (int i = 0; i < n; ++i) {
      const double sk = opt_.atol + opt_.rtol * std::abs(y_[i]);
      dnf += (k1_[i] / sk) * (k1_[i] / sk);
      dny += (y_[i] / sk) * (y_[i] / sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min(h, opt_.h_max);
    Vec y1;
    for (int i = 0; i < n; ++i) y1[i] = y_[i] + dir_ * h * k1_[i];
    const Vec k2 = f_(s_ + dir_ * h, y1);
    ++nfev_;
    double der2 = 0;
    for (int i = 0; i < n; ++i) {
      const double sk = opt_.atol + opt_.rtol * std::abs(y_[i]);
      der2 += ((k2[i] - k1_[i]) / sk) * ((k2[i] - k1_[i]) / sk);
    }
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3)
                                     : std::pow(0.01 / der12, 1.0 / 8.0);
    return std::min({100 * std::abs(h), h1, opt_.h_max});
  }

  Field f_;
  Dop853Options opt_;
  double s_, s_old_ = 0, hlast_ = 1;
  Vec y_, y_old_{}, k1_;
  double dir_;
  double h_ = 0;
  double facold_ = 1e-4;
  long nfev_ = 0, nacc_ = 0, nrej_ = 0;
  std::array<Vec, 8> rc_{};
};

}  // namespace ecotrace
