//! Python bindings: `Pool`, `Heap` and `Handle` over 64-bit integer keys with
//! arbitrary Python objects as items.

use std::sync::{Mutex, MutexGuard};

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use violation_heap::{full_audit, AuditOptions, HeapRef, NodeHandle};

create_exception!(vheap, HeapError, PyException, "Invalid heap operation.");

type Inner = violation_heap::Pool<i64, Py<PyAny>>;

fn heap_err(e: violation_heap::HeapError) -> PyErr {
    HeapError::new_err(e.to_string())
}

/// Node storage shared by every heap created from it; only heaps of the same
/// pool can be melded.
#[pyclass(module = "vheap")]
struct Pool {
    inner: Mutex<Inner>,
}

impl Pool {
    fn lock(&self) -> MutexGuard<'_, Inner> {
        self.inner.lock().unwrap_or_else(|p| p.into_inner())
    }
}

#[pymethods]
impl Pool {
    #[new]
    fn new() -> Self {
        Pool {
            inner: Mutex::new(Inner::new()),
        }
    }

    /// Create an empty heap in this pool.
    fn heap(slf: Bound<'_, Self>) -> Heap {
        let href = slf.borrow().lock().heap_new();
        Heap {
            pool: slf.unbind(),
            href,
        }
    }

    /// Number of live nodes across all heaps.
    fn __len__(&self) -> usize {
        self.lock().live_count()
    }

    /// Operation counters as a dict.
    fn telemetry(&self) -> std::collections::BTreeMap<&'static str, u64> {
        let t = *self.lock().telemetry();
        [
            ("comparisons", t.comparisons),
            ("inserts", t.inserts),
            ("melds", t.melds),
            ("decrease_keys", t.decrease_keys),
            ("delete_mins", t.delete_mins),
            ("joins", t.joins),
            ("cuts", t.cuts),
            ("rank_updates", t.rank_updates),
            ("nonunit_rank_steps", t.nonunit_rank_steps),
            ("longest_critical_path", t.longest_critical_path),
            ("max_rank", u64::from(t.max_rank)),
        ]
        .into_iter()
        .collect()
    }
}

/// Reference to a node; valid until the node is removed by `delete_min`.
#[pyclass(module = "vheap", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Handle {
    inner: NodeHandle,
}

#[pymethods]
impl Handle {
    fn __repr__(&self) -> String {
        format!("Handle({})", self.inner)
    }
}

/// A violation heap. `meld` consumes both operands.
#[pyclass(module = "vheap")]
struct Heap {
    pool: Py<Pool>,
    href: HeapRef,
}

impl Heap {
    fn with<R>(&self, py: Python<'_>, f: impl FnOnce(&mut Inner, HeapRef) -> R) -> R {
        let pool = self.pool.borrow(py);
        let mut inner = pool.lock();
        f(&mut inner, self.href)
    }
}

#[pymethods]
impl Heap {
    #[pyo3(signature = (key, item=None))]
    fn insert(&self, py: Python<'_>, key: i64, item: Option<Py<PyAny>>) -> PyResult<Handle> {
        let item = item.unwrap_or_else(|| py.None());
        self.with(py, |p, h| p.insert(h, key, item))
            .map(|inner| Handle { inner })
            .map_err(heap_err)
    }

    /// `(key, item)` of the minimum, or `None` if the heap is empty.
    fn find_min(&self, py: Python<'_>) -> PyResult<Option<(i64, Py<PyAny>)>> {
        self.with(py, |p, h| {
            p.find_min(h)
                .map(|m| m.map(|(k, i)| (*k, i.clone_ref(py))))
        })
        .map_err(heap_err)
    }

    fn delete_min(&self, py: Python<'_>) -> PyResult<(i64, Py<PyAny>)> {
        self.with(py, |p, h| p.delete_min(h)).map_err(heap_err)
    }

    fn decrease_key(&self, py: Python<'_>, handle: &Handle, new_key: i64) -> PyResult<()> {
        self.with(py, |p, h| p.decrease_key(h, handle.inner, new_key))
            .map_err(heap_err)
    }

    /// Meld `other` into a new heap; both `self` and `other` become invalid.
    fn meld(&self, py: Python<'_>, other: &Heap) -> PyResult<Heap> {
        if !self.pool.is(&other.pool) {
            return Err(heap_err(violation_heap::HeapError::PoolMismatch));
        }
        let href = self.with(py, |p, h| p.meld(h, other.href)).map_err(heap_err)?;
        Ok(Heap {
            pool: self.pool.clone_ref(py),
            href,
        })
    }

    fn key(&self, py: Python<'_>, handle: &Handle) -> PyResult<i64> {
        self.with(py, |p, _| p.key(handle.inner).copied()).map_err(heap_err)
    }

    fn __len__(&self, py: Python<'_>) -> PyResult<usize> {
        self.with(py, |p, h| p.size(h)).map_err(heap_err)
    }

    /// Whether this heap can still be used (it has not been melded away).
    fn is_valid(&self, py: Python<'_>) -> bool {
        self.with(py, |p, h| p.is_live_heap(h))
    }

    /// Full structural audit as a JSON string.
    #[pyo3(signature = (root_multiplicity=false))]
    fn audit(&self, py: Python<'_>, root_multiplicity: bool) -> String {
        let opts = AuditOptions {
            root_multiplicity,
            ..AuditOptions::default()
        };
        self.with(py, |p, h| full_audit(p, h, opts).to_json())
    }
}

#[pymodule]
fn vheap(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Pool>()?;
    m.add_class::<Heap>()?;
    m.add_class::<Handle>()?;
    m.add("HeapError", m.py().get_type::<HeapError>())?;
    Ok(())
}
