//! Minimal reverse-mode autodiff over dense 2-D f64 matrices: just the
//! operations the classifier's forward pass needs. Values are computed
//! eagerly; `backward` walks the tape once in reverse.

// The kernels read as textbook (row, col) index math; iterator chains over
// flat storage would obscure the masking logic.
#![allow(clippy::needless_range_loop)]

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in &rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    *out.at_mut(i, j) += a * other.at(k, j);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.at_mut(j, i) = self.at(i, j);
            }
        }
        out
    }
}

const LN_EPS: f64 = 1e-5;

/// GELU, tanh approximation.
fn gelu(x: f64) -> f64 {
    0.5 * x * (1.0 + (0.7978845608028654 * (x + 0.044715 * x * x * x)).tanh())
}

fn gelu_prime(x: f64) -> f64 {
    let c = 0.7978845608028654;
    let u = c * (x + 0.044715 * x * x * x);
    let t = u.tanh();
    let du = c * (1.0 + 3.0 * 0.044715 * x * x);
    0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du
}

#[derive(Debug, Clone)]
enum Op {
    Leaf,
    /// Rows of `src` gathered by index (embedding lookup).
    Gather { src: Var, idx: Vec<usize> },
    MatMul(Var, Var),
    Transpose(Var),
    Add(Var, Var),
    MulElem(Var, Var),
    Scale(Var, f64),
    /// Broadcast-add a 1 x c row vector to every row.
    AddRow(Var, Var),
    /// Broadcast-multiply by a 1 x c row vector.
    MulRow(Var, Var),
    /// Per-row standardization (mean 0, variance 1, epsilon-stabilized).
    LayerNorm(Var),
    Gelu(Var),
    Tanh(Var),
    /// Row-wise softmax; `keep[j] == false` columns are excluded (treated as
    /// negative infinity).
    SoftmaxRows { input: Var, keep: Vec<bool> },
    /// Horizontal concatenation.
    ConcatCols(Vec<Var>),
    /// Cross-entropy of a 1 x c logits row against a class index; output 1x1.
    CrossEntropy { logits: Var, target: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

struct Node {
    value: Matrix,
    grad: Matrix,
    op: Op,
}

#[derive(Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

impl Tape {
    pub fn new() -> Self {
        Tape::default()
    }

    fn push(&mut self, value: Matrix, op: Op) -> Var {
        let grad = Matrix::zeros(value.rows, value.cols);
        self.nodes.push(Node { value, grad, op });
        Var(self.nodes.len() - 1)
    }

    pub fn leaf(&mut self, value: Matrix) -> Var {
        self.push(value, Op::Leaf)
    }

    pub fn value(&self, v: Var) -> &Matrix {
        &self.nodes[v.0].value
    }

    pub fn grad(&self, v: Var) -> &Matrix {
        &self.nodes[v.0].grad
    }

    pub fn gather(&mut self, src: Var, idx: &[usize]) -> Var {
        let s = self.value(src);
        let mut out = Matrix::zeros(idx.len(), s.cols);
        for (i, &r) in idx.iter().enumerate() {
            for c in 0..s.cols {
                *out.at_mut(i, c) = s.at(r, c);
            }
        }
        self.push(out, Op::Gather { src, idx: idx.to_vec() })
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Var {
        let out = self.value(a).matmul(self.value(b));
        self.push(out, Op::MatMul(a, b))
    }

    pub fn transpose(&mut self, a: Var) -> Var {
        let out = self.value(a).transpose();
        self.push(out, Op::Transpose(a))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        let (va, vb) = (self.value(a), self.value(b));
        assert_eq!((va.rows, va.cols), (vb.rows, vb.cols), "add shape mismatch");
        let data = va.data.iter().zip(&vb.data).map(|(x, y)| x + y).collect();
        let out = Matrix { rows: va.rows, cols: va.cols, data };
        self.push(out, Op::Add(a, b))
    }

    pub fn mul_elem(&mut self, a: Var, b: Var) -> Var {
        let (va, vb) = (self.value(a), self.value(b));
        assert_eq!((va.rows, va.cols), (vb.rows, vb.cols), "mul shape mismatch");
        let data = va.data.iter().zip(&vb.data).map(|(x, y)| x * y).collect();
        let out = Matrix { rows: va.rows, cols: va.cols, data };
        self.push(out, Op::MulElem(a, b))
    }

    pub fn scale(&mut self, a: Var, k: f64) -> Var {
        let va = self.value(a);
        let out = Matrix { rows: va.rows, cols: va.cols, data: va.data.iter().map(|x| x * k).collect() };
        self.push(out, Op::Scale(a, k))
    }

    pub fn add_row(&mut self, a: Var, row: Var) -> Var {
        let (va, vr) = (self.value(a), self.value(row));
        assert_eq!(vr.rows, 1);
        assert_eq!(va.cols, vr.cols, "add_row width mismatch");
        let mut out = va.clone();
        for i in 0..out.rows {
            for j in 0..out.cols {
                *out.at_mut(i, j) += vr.at(0, j);
            }
        }
        self.push(out, Op::AddRow(a, row))
    }

    pub fn mul_row(&mut self, a: Var, row: Var) -> Var {
        let (va, vr) = (self.value(a), self.value(row));
        assert_eq!(vr.rows, 1);
        assert_eq!(va.cols, vr.cols, "mul_row width mismatch");
        let mut out = va.clone();
        for i in 0..out.rows {
            for j in 0..out.cols {
                *out.at_mut(i, j) *= vr.at(0, j);
            }
        }
        self.push(out, Op::MulRow(a, row))
    }

    pub fn layer_norm(&mut self, a: Var) -> Var {
        let va = self.value(a);
        let mut out = va.clone();
        for i in 0..va.rows {
            let row = &va.data[i * va.cols..(i + 1) * va.cols];
            let n = va.cols as f64;
            let mean = row.iter().sum::<f64>() / n;
            let var = row.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
            let denom = (var + LN_EPS).sqrt();
            for j in 0..va.cols {
                *out.at_mut(i, j) = (row[j] - mean) / denom;
            }
        }
        self.push(out, Op::LayerNorm(a))
    }

    pub fn gelu(&mut self, a: Var) -> Var {
        let va = self.value(a);
        let out = Matrix { rows: va.rows, cols: va.cols, data: va.data.iter().map(|&x| gelu(x)).collect() };
        self.push(out, Op::Gelu(a))
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        let va = self.value(a);
        let out = Matrix { rows: va.rows, cols: va.cols, data: va.data.iter().map(|x| x.tanh()).collect() };
        self.push(out, Op::Tanh(a))
    }

    /// Row softmax over the columns with `keep[j] == true`; excluded columns
    /// get probability 0. Panics if no column is kept.
    pub fn softmax_rows(&mut self, input: Var, keep: &[bool]) -> Var {
        let va = self.value(input);
        assert_eq!(keep.len(), va.cols, "mask width mismatch");
        assert!(keep.iter().any(|&k| k), "all columns masked");
        let mut out = Matrix::zeros(va.rows, va.cols);
        for i in 0..va.rows {
            let max = (0..va.cols)
                .filter(|&j| keep[j])
                .map(|j| va.at(i, j))
                .fold(f64::NEG_INFINITY, f64::max);
            let mut denom = 0.0;
            for j in 0..va.cols {
                if keep[j] {
                    let e = (va.at(i, j) - max).exp();
                    *out.at_mut(i, j) = e;
                    denom += e;
                }
            }
            for j in 0..va.cols {
                *out.at_mut(i, j) /= denom;
            }
        }
        self.push(out, Op::SoftmaxRows { input, keep: keep.to_vec() })
    }

    pub fn concat_cols(&mut self, parts: &[Var]) -> Var {
        assert!(!parts.is_empty());
        let rows = self.value(parts[0]).rows;
        let cols: usize = parts.iter().map(|&p| self.value(p).cols).sum();
        let mut out = Matrix::zeros(rows, cols);
        let mut base = 0;
        for &p in parts {
            let vp = self.value(p);
            assert_eq!(vp.rows, rows, "concat row mismatch");
            for i in 0..rows {
                for j in 0..vp.cols {
                    *out.at_mut(i, base + j) = vp.at(i, j);
                }
            }
            base += vp.cols;
        }
        self.push(out, Op::ConcatCols(parts.to_vec()))
    }

    pub fn cross_entropy(&mut self, logits: Var, target: usize) -> Var {
        let vl = self.value(logits);
        assert_eq!(vl.rows, 1, "logits must be a row vector");
        assert!(target < vl.cols, "target class out of range");
        let max = vl.data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + vl.data.iter().map(|x| (x - max).exp()).sum::<f64>().ln();
        let loss = lse - vl.at(0, target);
        self.push(Matrix { rows: 1, cols: 1, data: vec![loss] }, Op::CrossEntropy { logits, target })
    }

    /// Backpropagates from a 1x1 scalar node.
    pub fn backward(&mut self, loss: Var) {
        {
            let node = &mut self.nodes[loss.0];
            assert_eq!((node.value.rows, node.value.cols), (1, 1), "loss must be scalar");
            node.grad.data[0] = 1.0;
        }
        for i in (0..=loss.0).rev() {
            let grad = self.nodes[i].grad.clone();
            if grad.data.iter().all(|&g| g == 0.0) {
                continue;
            }
            match self.nodes[i].op.clone() {
                Op::Leaf => {}
                Op::Gather { src, idx } => {
                    for (r, &row) in idx.iter().enumerate() {
                        for c in 0..grad.cols {
                            *self.nodes[src.0].grad.at_mut(row, c) += grad.at(r, c);
                        }
                    }
                }
                Op::MatMul(a, b) => {
                    let ga = grad.matmul(&self.nodes[b.0].value.transpose());
                    let gb = self.nodes[a.0].value.transpose().matmul(&grad);
                    accumulate(&mut self.nodes[a.0].grad, &ga);
                    accumulate(&mut self.nodes[b.0].grad, &gb);
                }
                Op::Transpose(a) => {
                    let ga = grad.transpose();
                    accumulate(&mut self.nodes[a.0].grad, &ga);
                }
                Op::Add(a, b) => {
                    accumulate(&mut self.nodes[a.0].grad, &grad);
                    accumulate(&mut self.nodes[b.0].grad, &grad);
                }
                Op::MulElem(a, b) => {
                    let va = self.nodes[a.0].value.clone();
                    let vb = self.nodes[b.0].value.clone();
                    let ga = Matrix {
                        rows: grad.rows,
                        cols: grad.cols,
                        data: grad.data.iter().zip(&vb.data).map(|(g, y)| g * y).collect(),
                    };
                    let gb = Matrix {
                        rows: grad.rows,
                        cols: grad.cols,
                        data: grad.data.iter().zip(&va.data).map(|(g, x)| g * x).collect(),
                    };
                    accumulate(&mut self.nodes[a.0].grad, &ga);
                    accumulate(&mut self.nodes[b.0].grad, &gb);
                }
                Op::Scale(a, k) => {
                    let ga = Matrix {
                        rows: grad.rows,
                        cols: grad.cols,
                        data: grad.data.iter().map(|g| g * k).collect(),
                    };
                    accumulate(&mut self.nodes[a.0].grad, &ga);
                }
                Op::AddRow(a, row) => {
                    accumulate(&mut self.nodes[a.0].grad, &grad);
                    for j in 0..grad.cols {
                        let sum: f64 = (0..grad.rows).map(|i| grad.at(i, j)).sum();
                        *self.nodes[row.0].grad.at_mut(0, j) += sum;
                    }
                }
                Op::MulRow(a, row) => {
                    let va = self.nodes[a.0].value.clone();
                    let vr = self.nodes[row.0].value.clone();
                    for i in 0..grad.rows {
                        for j in 0..grad.cols {
                            *self.nodes[a.0].grad.at_mut(i, j) += grad.at(i, j) * vr.at(0, j);
                        }
                    }
                    for j in 0..grad.cols {
                        let sum: f64 = (0..grad.rows).map(|i| grad.at(i, j) * va.at(i, j)).sum();
                        *self.nodes[row.0].grad.at_mut(0, j) += sum;
                    }
                }
                Op::LayerNorm(a) => {
                    let va = self.nodes[a.0].value.clone();
                    let n = va.cols as f64;
                    for i in 0..va.rows {
                        let row = &va.data[i * va.cols..(i + 1) * va.cols];
                        let mean = row.iter().sum::<f64>() / n;
                        let var = row.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
                        let denom = (var + LN_EPS).sqrt();
                        let y: Vec<f64> = row.iter().map(|x| (x - mean) / denom).collect();
                        let g: Vec<f64> = (0..va.cols).map(|j| grad.at(i, j)).collect();
                        let g_sum: f64 = g.iter().sum();
                        let gy_sum: f64 = g.iter().zip(&y).map(|(gj, yj)| gj * yj).sum();
                        for j in 0..va.cols {
                            let gx = (g[j] - g_sum / n - y[j] * gy_sum / n) / denom;
                            *self.nodes[a.0].grad.at_mut(i, j) += gx;
                        }
                    }
                }
                Op::Gelu(a) => {
                    let va = self.nodes[a.0].value.clone();
                    for (k, (&g, &x)) in grad.data.iter().zip(&va.data).enumerate() {
                        self.nodes[a.0].grad.data[k] += g * gelu_prime(x);
                    }
                }
                Op::Tanh(a) => {
                    let vy = self.nodes[i].value.clone();
                    for (k, (&g, &y)) in grad.data.iter().zip(&vy.data).enumerate() {
                        self.nodes[a.0].grad.data[k] += g * (1.0 - y * y);
                    }
                }
                Op::SoftmaxRows { input, keep } => {
                    let vy = self.nodes[i].value.clone();
                    for r in 0..vy.rows {
                        let dot: f64 = (0..vy.cols)
                            .filter(|&j| keep[j])
                            .map(|j| grad.at(r, j) * vy.at(r, j))
                            .sum();
                        for j in 0..vy.cols {
                            if keep[j] {
                                let gx = vy.at(r, j) * (grad.at(r, j) - dot);
                                *self.nodes[input.0].grad.at_mut(r, j) += gx;
                            }
                        }
                    }
                }
                Op::ConcatCols(parts) => {
                    let mut base = 0;
                    for p in parts {
                        let cols = self.nodes[p.0].value.cols;
                        for r in 0..grad.rows {
                            for j in 0..cols {
                                *self.nodes[p.0].grad.at_mut(r, j) += grad.at(r, base + j);
                            }
                        }
                        base += cols;
                    }
                }
                Op::CrossEntropy { logits, target } => {
                    let vl = self.nodes[logits.0].value.clone();
                    let g = grad.data[0];
                    let max = vl.data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let denom: f64 = vl.data.iter().map(|x| (x - max).exp()).sum();
                    for j in 0..vl.cols {
                        let p = (vl.at(0, j) - max).exp() / denom;
                        let onehot = if j == target { 1.0 } else { 0.0 };
                        *self.nodes[logits.0].grad.at_mut(0, j) += g * (p - onehot);
                    }
                }
            }
        }
    }
}

fn accumulate(dst: &mut Matrix, src: &Matrix) {
    debug_assert_eq!((dst.rows, dst.cols), (src.rows, src.cols));
    for (d, s) in dst.data.iter_mut().zip(&src.data) {
        *d += s;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_gradients_match_finite_differences() {
        let a0 = Matrix::from_rows(vec![vec![0.5, -1.0], vec![2.0, 0.25]]);
        let b0 = Matrix::from_rows(vec![vec![1.5, 0.5], vec![-0.75, 1.0]]);
        let loss_of = |a: &Matrix, b: &Matrix| {
            let mut t = Tape::new();
            let va = t.leaf(a.clone());
            let vb = t.leaf(b.clone());
            let prod = t.matmul(va, vb);
            let act = t.gelu(prod);
            let ln = t.layer_norm(act);
            let flat = t.scale(ln, 0.5);
            // Squash to a scalar through cross-entropy on the first row.
            let row = t.gather(flat, &[0]);
            t.cross_entropy(row, 1);
            let v = t.value(Var(t.nodes.len() - 1)).data[0];
            v
        };
        let mut t = Tape::new();
        let va = t.leaf(a0.clone());
        let vb = t.leaf(b0.clone());
        let prod = t.matmul(va, vb);
        let act = t.gelu(prod);
        let ln = t.layer_norm(act);
        let flat = t.scale(ln, 0.5);
        let row = t.gather(flat, &[0]);
        let loss = t.cross_entropy(row, 1);
        t.backward(loss);
        let h = 1e-6;
        for (r, c) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let mut ap = a0.clone();
            *ap.at_mut(r, c) += h;
            let mut am = a0.clone();
            *am.at_mut(r, c) -= h;
            let fd = (loss_of(&ap, &b0) - loss_of(&am, &b0)) / (2.0 * h);
            let an = t.grad(va).at(r, c);
            assert!((fd - an).abs() < 1e-6, "a[{r},{c}] fd={fd} an={an}");
        }
    }

    #[test]
    fn masked_softmax_rows_sum_to_one_over_kept_columns() {
        let mut t = Tape::new();
        let x = t.leaf(Matrix::from_rows(vec![vec![0.3, 5.0, -2.0, 1.0]]));
        let keep = [true, false, true, true];
        let y = t.softmax_rows(x, &keep);
        let v = t.value(y);
        assert_eq!(v.at(0, 1), 0.0);
        let sum: f64 = v.data.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }
}
