"""
Experiment Service Module
Runs the Monte-Carlo and sweep experiments behind `app.py experiment`.
Each runner returns (records DataFrame, summary dict).
"""

from concurrent.futures import ThreadPoolExecutor
from math import ceil, log2, pi, sqrt

import numpy as np
import pandas as pd

from config.config import config
from quantization.codec import (
    decode,
    decode_projection,
    derive_seed,
    design_matrix,
    encode,
    error_identity,
    frame_harmonic,
    frame_singular,
    make_selector,
    sample_unit_ball,
)
from quantization.sigmadelta import Alphabet, quantize_order_r, sufficient_alphabet
from spectra.spectral import decay_slope, eigh_gram, flatness
from utils.errors import PreconditionError
from utils.logger import get_logger

logger = get_logger(__name__)


def _alphabet_for(choice, r, y_max, step):
    if choice == "one_bit" or (choice == "auto" and r == 1):
        return Alphabet.one_bit()
    return sufficient_alphabet(y_max, r, step)


def _fit_slope(n_values, errors):
    if len(n_values) < 2:
        return float("nan")
    return float(np.polyfit(np.log(n_values), np.log(errors), 1)[0])


def rate_distortion_experiment(cfg):
    """
    For every (N, r, trial): draw x uniformly from the unit ball, quantize
    F x, compress, decode, and record the l2 error next to the bit count.
    """
    plans = {}
    for n in cfg.n_values:
        for r in cfg.r_values:
            decomp = eigh_gram(n, r) if (cfg.frame == "singular" or cfg.decoder == "projection") else None
            if cfg.frame == "singular":
                frame = frame_singular(n, cfg.d, r, decomp)
            else:
                frame = frame_harmonic(n, cfg.d, cfg.row_normalized)
            alphabet = _alphabet_for(cfg.alphabet, r, frame.max_row_norm, cfg.step)
            plans[(n, r)] = (frame, decomp, alphabet)

    def run_trial(task):
        n, r, trial = task
        frame, decomp, alphabet = plans[(n, r)]
        seed = derive_seed(cfg.seed, n, r, trial)
        rng = np.random.default_rng(seed)
        x = sample_unit_ball(cfg.d, rng)
        run = quantize_order_r(frame.synthesize(x), r, alphabet)
        m = cfg.m_for(n)
        record = {"N": n, "r": r, "d": cfg.d, "m": m, "trial": trial, "seed": seed,
                  "levels": alphabet.levels, "stable": run.stability_guaranteed,
                  "u_inf": float(np.max(np.abs(run.u)))}

        if cfg.decoder == "projection":
            ell = min(n, max(cfg.d, m))
            result = decode_projection(run.q, frame, r, ell, u=run.u, decomp=decomp)
            err = float(np.linalg.norm(x - result.x_hat))
            record.update(bits=n * ceil(log2(alphabet.size)), err_l2=err, predicted_err=np.nan,
                          identity_gap=np.nan, bound_rhs=result.bound)
            return record

        selector = make_selector(m, n, int(rng.integers(0, 2 ** 63)))
        payload = encode(run.q, r, selector, alphabet)
        x_hat = decode(payload, frame, selector, r)
        err, predicted, gap = error_identity(x, x_hat, run.u, frame, selector, r)
        smallest = float(np.linalg.svd(design_matrix(frame, selector, r), compute_uv=False).min())
        record.update(bits=payload.bit_count, err_l2=err, predicted_err=predicted, identity_gap=gap,
                      bound_rhs=float(np.linalg.norm(selector.apply(run.u))) / smallest)
        return record

    tasks = [(n, r, t) for n in cfg.n_values for r in cfg.r_values for t in range(cfg.trials)]
    logger.info("rate-distortion: %d trials on %d workers", len(tasks), config.THREADS)
    with ThreadPoolExecutor(max_workers=config.THREADS) as pool:
        records = list(pool.map(run_trial, tasks))

    frame = pd.DataFrame.from_records(records).sort_values(["r", "N", "trial"], kind="stable")
    frame = frame.reset_index(drop=True)

    summary = {"slopes": {}, "median_error": {}, "non_increasing": {}}
    for r, group in frame.groupby("r"):
        medians = group.groupby("N")["err_l2"].median().sort_index()
        summary["median_error"][str(r)] = {str(n): float(v) for n, v in medians.items()}
        summary["slopes"][str(r)] = _fit_slope(medians.index.to_numpy(dtype=float), medians.to_numpy())
        summary["non_increasing"][str(r)] = bool(np.all(np.diff(medians.to_numpy()) <= 0))
    return frame, summary


def sigma_min_check(cfg):
    """
    sigma_min(W^T R F) / sqrt(ell) over independent row draws, where F holds
    the d lowest DFT columns of size N, R samples m time-ordered rows and W
    holds the ell least significant left singular vectors of the m x m D^r.
    """
    if cfg.ell > cfg.m / pi ** 2:
        raise PreconditionError(f"ell={cfg.ell} exceeds m / pi^2 = {cfg.m / pi ** 2:.2f}")
    n = cfg.n or 8 * cfg.m
    decomp = eigh_gram(cfg.m, cfg.r)
    w = decomp.U[:, ::-1][:, :cfg.ell]
    freqs = np.arange(cfg.d)

    records = []
    for trial in range(cfg.trials):
        seed = derive_seed(cfg.seed, cfg.m, cfg.r, trial)
        times = np.sort(np.random.default_rng(seed).integers(0, n, size=cfg.m))
        sampled = np.exp(2j * pi * np.outer(times, freqs) / n)
        smallest = float(np.linalg.svd(w.T @ sampled, compute_uv=False).min())
        records.append({"trial": trial, "seed": seed, "sigma_min": smallest, "ratio": smallest / sqrt(cfg.ell)})

    frame = pd.DataFrame.from_records(records)
    ratios = frame["ratio"].to_numpy()
    summary = {
        "min": float(ratios.min()),
        "q10": float(np.quantile(ratios, 0.1)),
        "median": float(np.median(ratios)),
        "q90": float(np.quantile(ratios, 0.9)),
        "max": float(ratios.max()),
        "fraction_above": float(np.mean(ratios >= 1.0 - cfg.eta)),
        "threshold": 1.0 - cfg.eta,
    }
    return frame, summary


def flatness_sweep(cfg):
    records = []
    for r in cfg.r_values:
        for n in cfg.n_values:
            if 2 * r >= n:
                continue
            report = flatness(eigh_gram(n, r))
            records.append({"N": n, "r": r, "s_v": report.s, "s_u": report.s_u})
    frame = pd.DataFrame.from_records(records, columns=["N", "r", "s_v", "s_u"])
    summary = {str(r): float(group["s_v"].max()) for r, group in frame.groupby("r")}
    return frame, {"max_s_v": summary}


def sigma_decay(cfg):
    """
    Records sigma_{N-j+1} and the ratio sigma_{N-j+1} / (j/N)^r for j = 1..N
    (j counts from the bottom of the spectrum), plus the fitted decay slope per r.
    """
    records = []
    slopes = {}
    corrected = {}
    n = cfg.n
    j = np.arange(1, n + 1)
    for r in cfg.r_values:
        decomp = eigh_gram(n, r)
        tail = decomp.sigma[::-1]
        ratio = tail / (j / n) ** r
        records.append(pd.DataFrame({"r": r, "j": j, "sigma": tail, "ratio": ratio}))
        slopes[str(r)] = decay_slope(decomp, cfg.lo, cfg.hi)
        corrected[str(r)] = decay_slope(decomp, 0.1, 0.5, corrected=True)
    frame = pd.concat(records, ignore_index=True)
    return frame, {"slopes": slopes, "band": [cfg.lo, cfg.hi], "corrected_slopes": corrected}
