"""
Алгебра симметричных тензоров 3×3 для формул скачков на границе фаз.

Хранение: нотация Манделя, шесть компонент в порядке (11, 22, 33, 23, 13, 12),
сдвиговые компоненты умножены на √2. При такой записи двойная свёртка
α:β равна скалярному произведению векторов, а тензор упругости D задаётся
симметричной матрицей 6×6, так что α:Dβ = αᵀ·C·β без дополнительных множителей.
"""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


SQRT2 = math.sqrt(2.0)

# Индексы (i, j) матрицы для каждой компоненты Манделя
_MANDEL_INDEX = ((0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1))
_MANDEL_WEIGHT = np.array([1.0, 1.0, 1.0, SQRT2, SQRT2, SQRT2])

# Допуск положительной определённости тензора упругости
EIGEN_TOL = 1e-10
UNIT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SymTensor3:
    """Симметричный тензор 3×3 (деформация или напряжение) в нотации Манделя."""
    mandel: np.ndarray

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "SymTensor3":
        """Создаёт тензор из матрицы 3×3, симметризуя её."""
        m = np.asarray(matrix, dtype=float)
        sym = 0.5 * (m + m.T)
        return cls(np.array([sym[i, j] for i, j in _MANDEL_INDEX]) * _MANDEL_WEIGHT)

    @classmethod
    def from_components(cls, xx: float, yy: float, zz: float,
                        yz: float = 0.0, xz: float = 0.0, xy: float = 0.0) -> "SymTensor3":
        """Создаёт тензор из тензорных (не инженерных) компонент."""
        return cls(np.array([xx, yy, zz, yz, xz, xy], dtype=float) * _MANDEL_WEIGHT)

    @classmethod
    def identity(cls) -> "SymTensor3":
        return cls.from_components(1.0, 1.0, 1.0)

    @classmethod
    def zero(cls) -> "SymTensor3":
        return cls(np.zeros(6))

    def to_matrix(self) -> np.ndarray:
        """Возвращает полную матрицу 3×3."""
        comps = self.mandel / _MANDEL_WEIGHT
        m = np.zeros((3, 3))
        for value, (i, j) in zip(comps, _MANDEL_INDEX):
            m[i, j] = value
            m[j, i] = value
        return m

    def ddot(self, other: "SymTensor3") -> float:
        """Двойная свёртка self : other."""
        return float(self.mandel @ other.mandel)

    def dot(self, vector: Sequence[float]) -> np.ndarray:
        """Действие тензора на вектор."""
        return self.to_matrix() @ np.asarray(vector, dtype=float)

    def __add__(self, other: "SymTensor3") -> "SymTensor3":
        return SymTensor3(self.mandel + other.mandel)

    def __sub__(self, other: "SymTensor3") -> "SymTensor3":
        return SymTensor3(self.mandel - other.mandel)

    def __mul__(self, factor: float) -> "SymTensor3":
        return SymTensor3(self.mandel * factor)

    __rmul__ = __mul__

    def __neg__(self) -> "SymTensor3":
        return SymTensor3(-self.mandel)


@dataclass(frozen=True, eq=False)
class ElasticityTensor:
    """
    Тензор упругости D: 𝕊³ → 𝕊³ как симметричная положительно определённая матрица 6×6
    в нотации Манделя.
    """
    matrix: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.matrix, dtype=float)
        if c.shape != (6, 6):
            raise ValueError(f"Матрица тензора упругости должна быть 6×6, получено {c.shape}")
        if not np.allclose(c, c.T, atol=EIGEN_TOL):
            raise ValueError("Матрица тензора упругости несимметрична")
        smallest = float(np.linalg.eigvalsh(0.5 * (c + c.T)).min())
        if smallest <= EIGEN_TOL:
            raise ValueError(f"Тензор упругости не положительно определён: λ_min = {smallest:.3e}")
        object.__setattr__(self, "matrix", 0.5 * (c + c.T))

    @classmethod
    def isotropic(cls, lame_lambda: float, lame_mu: float) -> "ElasticityTensor":
        """
        Изотропная среда: Dε = λₑ tr(ε) I + 2μₑ ε.

        Args:
            lame_lambda: Первый параметр Ламе λₑ
            lame_mu: Модуль сдвига μₑ
        """
        trace = np.array([1.0, 1.0, 1.0, 0.0, 0.0, 0.0])
        return cls(lame_lambda * np.outer(trace, trace) + 2.0 * lame_mu * np.eye(6))

    @classmethod
    def from_array(cls, raw: np.ndarray) -> "ElasticityTensor":
        """Произвольная анизотропия (21 константа) по матрице 6×6 в нотации Манделя."""
        return cls(np.array(raw, dtype=float))

    def apply(self, eps: SymTensor3) -> SymTensor3:
        return SymTensor3(self.matrix @ eps.mandel)

    def inner(self, alpha: SymTensor3, beta: SymTensor3) -> float:
        """Скалярное произведение α :_D β = α : Dβ."""
        return float(alpha.mandel @ self.matrix @ beta.mandel)


@dataclass(frozen=True, eq=False)
class JumpData3D:
    """
    Скачки решения первой задачи сопряжения на плоской границе.

    Attributes:
        u_star: Вектор u* = [∂ₙû]
        strain_jump: [ε(∇û)] = Pₙε̄
        stress_jump: [T̂] = −D Qₙ ε̄
    """
    u_star: np.ndarray
    strain_jump: SymTensor3
    stress_jump: SymTensor3


def sym_outer(w: Sequence[float], n: Sequence[float]) -> SymTensor3:
    """ε(w⊗n) = ½(w⊗n + n⊗w)."""
    return SymTensor3.from_matrix(np.outer(np.asarray(w, dtype=float), np.asarray(n, dtype=float)))


def _check_unit(n: Sequence[float]) -> np.ndarray:
    vector = np.asarray(n, dtype=float)
    if vector.shape != (3,) or abs(np.linalg.norm(vector) - 1.0) > UNIT_TOL:
        raise ValueError(f"Нормаль должна быть единичным 3-вектором, получено {vector}")
    return vector


def acoustic_matrix(D: ElasticityTensor, n: Sequence[float]) -> np.ndarray:
    """Матрица отображения B ω = (D ε(ω⊗n)) n."""
    normal = _check_unit(n)
    columns = [D.apply(sym_outer(e, normal)).dot(normal) for e in np.eye(3)]
    return np.column_stack(columns)


def _normal_solve(D: ElasticityTensor, n: np.ndarray, eps: SymTensor3) -> np.ndarray:
    rhs = D.apply(eps).dot(n)
    try:
        return np.linalg.solve(acoustic_matrix(D, n), rhs)
    except np.linalg.LinAlgError as e:
        # для положительно определённого D матрица B невырождена
        raise RuntimeError(f"Внутренняя ошибка: вырожденная матрица B для n={n}") from e


def project_normal(D: ElasticityTensor, n: Sequence[float], eps: SymTensor3) -> SymTensor3:
    """
    D-ортогональная проекция Pₙ на подпространство 𝕊³ₙ = {ε(ω⊗n)}.

    Args:
        D: Тензор упругости
        n: Единичная нормаль
        eps: Проектируемый тензор

    Returns:
        ε(ω⊗n), где B ω = (D eps) n

    Raises:
        ValueError: Если |n| ≠ 1
    """
    normal = _check_unit(n)
    return sym_outer(_normal_solve(D, normal, eps), normal)


def jump_data(D: ElasticityTensor, n: Sequence[float], eps_bar: SymTensor3) -> JumpData3D:
    """
    Скачки u*, [ε(∇û)], [T̂] на границе с нормалью n, направленной в фазу S = 1.

    u* решает (D(ε(u*⊗n) − ε̄))n = 0, [ε(∇û)] = Pₙε̄, [T̂] = −D(ε̄ − Pₙε̄).
    """
    normal = _check_unit(n)
    u_star = _normal_solve(D, normal, eps_bar)
    strain_jump = sym_outer(u_star, normal)
    stress_jump = -D.apply(eps_bar - strain_jump)
    return JumpData3D(u_star=u_star, strain_jump=strain_jump, stress_jump=stress_jump)


def eshelby_normal_jump(T_plus: SymTensor3, T_minus: SymTensor3, eps_bar: SymTensor3,
                        psi_jump_over_sqrt_mu: float) -> float:
    """
    Нормальная компонента скачка тензора Эшелби: μ^{-1/2}[ψ̂(Ŝ)] − ε̄:⟨T̂⟩.

    Args:
        T_plus: Напряжение со стороны фазы S = 1
        T_minus: Напряжение со стороны фазы S = 0
        eps_bar: Деформация превращения ε̄
        psi_jump_over_sqrt_mu: μ^{-1/2}[ψ̂(Ŝ)] (ноль для ям одной высоты)
    """
    mean = 0.5 * (T_plus + T_minus)
    return psi_jump_over_sqrt_mu - eps_bar.ddot(mean)


def eshelby_tensor(D: ElasticityTensor, grad_u: np.ndarray, eps_bar: SymTensor3,
                   S: float, psi_over_sqrt_mu: float) -> np.ndarray:
    """
    Тензор Эшелби Ĉ = ψ_μ I − (I + ∇u)ᵀ T, ψ_μ = W + μ^{-1/2}ψ̂(S).

    Returns:
        Матрица 3×3 (в общем случае несимметричная)
    """
    grad = np.asarray(grad_u, dtype=float)
    elastic_strain = SymTensor3.from_matrix(grad) - eps_bar * S
    stress = D.apply(elastic_strain)
    energy = 0.5 * elastic_strain.ddot(stress) + psi_over_sqrt_mu
    return energy * np.eye(3) - (np.eye(3) + grad).T @ stress.to_matrix()


def planar_eshelby_jump(D: ElasticityTensor, n: Sequence[float], eps_bar: SymTensor3,
                        grad_u_minus: np.ndarray, psi_jump_over_sqrt_mu: float = 0.0) -> float:
    """
    n·[Ĉ]n по обеим сторонам синтетической плоской границы.

    Градиент со стороны S = 1 получается из ∇u⁺ = ∇u⁻ + u*⊗n, так что
    [u] = 0 и [T]n = 0 выполнены точно.
    """
    normal = _check_unit(n)
    jumps = jump_data(D, normal, eps_bar)
    grad_minus = np.asarray(grad_u_minus, dtype=float)
    grad_plus = grad_minus + np.outer(jumps.u_star, normal)
    c_plus = eshelby_tensor(D, grad_plus, eps_bar, 1.0, psi_jump_over_sqrt_mu)
    c_minus = eshelby_tensor(D, grad_minus, eps_bar, 0.0, 0.0)
    return float(normal @ (c_plus - c_minus) @ normal)


def check_displacement_jump(u_star: np.ndarray, eps_T_plus: float, eps_T_minus: float,
                            psi_pp0: float, psi_pp1: float) -> np.ndarray:
    """Скачок нормальной производной второй поправки: [∂ₙǔ] = [ε̄:T̂/ψ̂''(Ŝ)]·u*."""
    return (eps_T_plus / psi_pp1 - eps_T_minus / psi_pp0) * np.asarray(u_star, dtype=float)
