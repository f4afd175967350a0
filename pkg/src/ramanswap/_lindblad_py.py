"""Pure-numpy RK4 Lindblad integrator, same contract as the compiled kernel."""

import numpy as np


def rk4_lindblad(rho0, heff0, hd, pin, jumps, om, ain, h, substeps):
    r = np.array(rho0, dtype=complex)
    n = r.shape[0]
    jumps = np.asarray(jumps, dtype=complex).reshape(-1, n, n)
    jd = jumps.conj().transpose(0, 2, 1)
    om = np.asarray(om, dtype=float)
    ain = np.asarray(ain, dtype=complex)
    nsub = (om.size - 1) // 2
    if om.size != ain.size or om.size != 2 * nsub + 1:
        raise ValueError("om and ain must share an odd-length half-step grid")
    if nsub % substeps:
        raise ValueError("half-step grid length is not a multiple of substeps")
    pd = np.asarray(pin).conj().T
    hs = (heff0[None] + om[:, None, None] * hd[None] + ain[:, None, None] * pin[None]
          + ain.conj()[:, None, None] * pd[None])

    def rhs(hm, x):
        return -1j * (hm @ x - x @ hm.conj().T) + np.sum(jumps @ x @ jd, axis=0)

    out = np.empty((nsub // substeps + 1, n, n), dtype=complex)
    out[0] = r
    for s in range(nsub):
        q = 2 * s
        k1 = rhs(hs[q], r)
        k2 = rhs(hs[q + 1], r + 0.5 * h * k1)
        k3 = rhs(hs[q + 1], r + 0.5 * h * k2)
        k4 = rhs(hs[q + 2], r + h * k3)
        r = r + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if (s + 1) % substeps == 0:
            out[(s + 1) // substeps] = r
    return out
