import pytest


@pytest.fixture()
def histogram_csv(tmp_path):
    path = tmp_path / "hist.csv"
    path.write_text(
        "kind,bin,count,surviving\n"
        "weight,1,2,1\n"
        "weight,2,6,1\n"
        "frequency,3,8,2\n"
    )
    return path


@pytest.fixture()
def sweep_csv(tmp_path):
    path = tmp_path / "sweep.csv"
    lines = ["w_cut,nu_cut,mae,stderr,bound"]
    for w in (1, 2, "full"):
        for nu in (2, "full"):
            mae = 0.5 / ((1 if w == "full" else w) + (1 if nu == "full" else nu))
            bound = "" if "full" in (w, nu) else f"{mae * 2:.6g}"
            lines.append(f"{w},{nu},{mae:.6g},{mae / 10:.6g},{bound}")
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture()
def phase_csv(tmp_path):
    path = tmp_path / "phase.csv"
    lines = ["kappa,h,e_vqe_surrogate,e_vqe_true,e_exact,rel_error,seed,w_cut,nu_cut"]
    seed = 0
    for k in (0.0, 0.5):
        for h in (0.2, 0.8):
            e = -(1 + k + h)
            lines.append(f"{k},{h},{e:.6g},{e * 0.99:.6g},{e:.6g},0.01,{seed},8,20")
            seed += 1
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture()
def trace_csv(tmp_path):
    path = tmp_path / "trace.csv"
    lines = ["step,energy,grad_norm"]
    for step in range(1, 51):
        lines.append(f"{step},{-3 + 2 / step:.6g},{1 / step:.6g}")
    path.write_text("\n".join(lines) + "\n")
    return path
