"""SVG summary figure: log-log regret curve and per-T collision rates."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .harness import summarize  # noqa: E402


def emit_svg_summary(results, path, title=None) -> None:
    rows = summarize(results)
    # fixed salt and no date keep the SVG bytes reproducible
    with matplotlib.rc_context({"svg.hashsalt": "coordbandit", "svg.fonttype": "none"}):
        fig, (ax_r, ax_c) = plt.subplots(1, 2, figsize=(9, 3.6))
        Ts = [r.T for r in rows]
        means = [r.mean_regret for r in rows]
        if rows:
            ax_r.loglog(Ts, [max(m, 1e-12) for m in means], "o-", base=2)
            ax_c.bar(range(len(rows)), [r.collision_rate for r in rows], color="tab:red")
            ax_c.set_xticks(range(len(rows)), [f"2^{r.T.bit_length() - 1}" if r.T & (r.T - 1) == 0
                                               else str(r.T) for r in rows])
        ax_r.set_xlabel("T")
        ax_r.set_ylabel("mean pseudo-regret")
        ax_r.set_title("regret")
        ax_c.set_ylim(0, 1)
        ax_c.set_xlabel("T")
        ax_c.set_ylabel("episodes with a collision")
        ax_c.set_title("collision rate")
        if title:
            fig.suptitle(title)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
