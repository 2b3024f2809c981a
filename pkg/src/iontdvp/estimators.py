"""scikit-learn style wrappers around the stability map and the energy landscape."""
import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_disk_array, check_points
from .dynamics import MONODROMY_TOL, MODES, stability_scan
from .husimi import assemble, evaluate_grid
from .trap import TrapConfig


def _template(cfg):
    if cfg is None:
        return TrapConfig.dimensionless()
    if not isinstance(cfg, TrapConfig):
        raise TypeError(f"trap must be a TrapConfig, got {type(cfg).__name__}")
    return cfg


class StabilityClassifier(ClassifierMixin, BaseEstimator):
    """Predict whether a trap mode is stable at Mathieu points ``(a_z, q_z)``.

    Nothing is learned; ``fit`` only checks the inputs and the template. Labels
    come from the one-period monodromy, so ``predict`` is exact up to the
    integration tolerance.

    Parameters
    ----------
    trap : TrapConfig or None
        Template whose voltages are replaced at each point. ``None`` uses
        dimensionless defaults.
    mode : {"axial", "radial", "both"}
        ``both`` labels a point stable only if both modes are.
    tol : float
        Monodromy integration tolerance.
    threads : int
        Worker threads for the scan.
    """

    def __init__(self, trap=None, mode="axial", tol=MONODROMY_TOL, threads=1):
        self.trap = trap
        self.mode = mode
        self.tol = tol
        self.threads = threads

    def _check_params(self):
        if self.mode not in MODES + ("both",):
            raise ValueError(f"mode must be 'axial', 'radial' or 'both', got {self.mode!r}")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        return _template(self.trap)

    def fit(self, X, y=None):
        self._check_params()
        X = check_points(X, 2)
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.array([False, True])
        return self

    def _records(self, X):
        check_is_fitted(self, "classes_")
        cfg = self._check_params()
        X = check_points(X, 2)
        return stability_scan(cfg, [tuple(r) for r in X], tol=self.tol, threads=self.threads)

    def decision_function(self, X):
        """Margin ``2 - |trace|``; positive inside the stable region (minimum over modes for ``both``)."""
        recs = self._records(X)
        tr_a = np.array([r.trace_a for r in recs])
        tr_r = np.array([r.trace_r for r in recs])
        m_a, m_r = 2.0 - np.abs(tr_a), 2.0 - np.abs(tr_r)
        if self.mode == "axial":
            return m_a
        if self.mode == "radial":
            return m_r
        return np.minimum(m_a, m_r)

    def predict(self, X):
        return self.decision_function(X) >= 0.0


class HusimiTransformer(TransformerMixin, BaseEstimator):
    """Map disk coordinates to energy-function features.

    Input rows are ``(Re z_a, Im z_a, Re z_r, Im z_r)``; output columns are
    ``(H, xi_a, eta_a, xi_r, eta_r)``.
    """

    def __init__(self, trap=None, t=0.0):
        self.trap = trap
        self.t = t

    def fit(self, X, y=None):
        cfg = _template(self.trap)
        X = check_points(X, 4)
        self.n_features_in_ = X.shape[1]
        self.coefficients_ = assemble(cfg, self.t)
        return self

    def transform(self, X):
        check_is_fitted(self, "coefficients_")
        X = check_points(X, 4).astype(float)
        za = check_disk_array(X[:, 0] + 1j * X[:, 1], "z_a")
        zr = check_disk_array(X[:, 2] + 1j * X[:, 3], "z_r")
        energy = evaluate_grid(self.coefficients_, za, zr)
        cols = [energy]
        for z in (za, zr):
            d = 1.0 - np.abs(z) ** 2
            cols += [np.abs(1 + z) ** 2 / d, np.abs(1 - z) ** 2 / d]
        return np.column_stack(cols)

    def get_feature_names_out(self, input_features=None):
        return np.array(["energy", "xi_a", "eta_a", "xi_r", "eta_r"], dtype=object)
