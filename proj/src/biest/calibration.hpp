#pragma once

namespace biest::calibration {

// Golden constants recorded at first calibration (fixed seeds, desk
// constants, window L=64 N=4096 unless stated).  Tests assert against these;
// regenerate with tools/biestlab verify --emit-calibration when the base
// bump or the grid conventions change.

// wave-packet decay certificates max |phi| |I|^{1/2} chi^{-M}, M = 2,4,8
inline constexpr double packet_decay_c[3] = {1.2106, 1.6121, 3.2914};
inline constexpr double packet_decay_rel_window = 0.05;

// Whitney symbol series: per-shell coefficient decay |c_k| (1+|k|)^4 <= C
inline constexpr double ck_decay_c = 4.0;
// reconstruction sup error at K = 5, desk constants, probe annulus d >= 1/4
inline constexpr double whitney_recon_tol = 1e-2;
// K-sweep monotonicity slack
inline constexpr double recon_monotone_slack = 1.05;

// finite-difference symbol-estimate probe: |d^alpha m'| dist^{|alpha|} <= C
inline constexpr double symb_est_c = 40.0;

// selection: sum of tree lengths <= C_sel 2^{2n} (normalized coefficients)
inline constexpr double c_sel = 64.0;  // 2^6

// John-Nirenberg two-sided window for measured ratios on random ensembles
inline constexpr double jn_ratio_lo = 0.24;
inline constexpr double jn_ratio_hi = 4.0;

// measured-constant ceilings (stability asserted separately)
inline constexpr double l2_bessel_c = 4.0;
inline constexpr double energy_lemma_c = 1.5;
inline constexpr double size_lemma_c[2] = {3.0, 3.0};  // M = 2, 4
inline constexpr double splitcor_c = 8.0;

// restricted-type experiments: pilot-calibrated ratio ceilings
inline constexpr double c_exp_biest = 16.0;
inline constexpr double c_exp_bht = 16.0;

}  // namespace biest::calibration
