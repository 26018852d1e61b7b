"""Model versus the two measured data sets, normalised and absolute.

Writes the CSV tables and SVG figures into ./out_demo.
"""
from photontriplets import load_config
from photontriplets.pipeline import absolute_curve, fit_scale_factor, fit_tf_to_data, normalized_error_bars, report, run_set

cfg = load_config()
for label in ("A", "B"):
    rows = run_set(label, cfg)
    lo, hi = normalized_error_bars(rows)
    print(f"set {label}")
    for r, a, b in zip(rows, lo, hi):
        flag = "in " if a <= r.norm_model <= b else "out"
        print(f"  xi_p={r.xi_p_uJ:5.2f} xi_sti={r.xi_sti_uJ:5.2f}  N_meas={r.n_measured:.3f} N_model={r.n_model:.3f}"
              f"  norm {r.norm_measured:.2f} [{a:.2f}, {b:.2f}] model {r.norm_model:.2f} {flag}")

pts = absolute_curve(cfg)
print(f"\nscale factor measured/model {fit_scale_factor(pts):.2f}")
fit = fit_tf_to_data(cfg)
print(f"T_F fitted to the model: {fit.value:.3f} ({fit.low:.3f} .. {fit.high:.3f}), at bound: {fit.at_bound}")

for path in report(cfg, "out_demo").values():
    print("wrote", path)
