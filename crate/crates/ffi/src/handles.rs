//! Handle table. A handle packs a slot index and the slot's generation, so a
//! released or reused slot never resolves a stale handle.

use std::sync::{Arc, Mutex, OnceLock, RwLock};

use mpcore::linalg::{DenseMatrix, PivotRecord};
use mpcore::refine::RefineReport;
use mpcore::MultiComp;

use crate::status::Status;

pub enum McMatrix {
    K2(DenseMatrix<MultiComp<2>>),
    K3(DenseMatrix<MultiComp<3>>),
    K4(DenseMatrix<MultiComp<4>>),
}

impl McMatrix {
    pub fn zeros(k: usize, rows: usize, cols: usize) -> Option<Self> {
        match k {
            2 => Some(McMatrix::K2(DenseMatrix::zeros(rows, cols, &()))),
            3 => Some(McMatrix::K3(DenseMatrix::zeros(rows, cols, &()))),
            4 => Some(McMatrix::K4(DenseMatrix::zeros(rows, cols, &()))),
            _ => None,
        }
    }

    pub fn k(&self) -> usize {
        match self {
            McMatrix::K2(_) => 2,
            McMatrix::K3(_) => 3,
            McMatrix::K4(_) => 4,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            McMatrix::K2(m) => (m.rows(), m.cols()),
            McMatrix::K3(m) => (m.rows(), m.cols()),
            McMatrix::K4(m) => (m.rows(), m.cols()),
        }
    }
}

pub enum Object {
    /// `is_vector` marks an `n × 1` matrix created as a vector.
    Matrix { m: McMatrix, is_vector: bool },
    Pivot(PivotRecord),
    Report(RefineReport),
}

pub type Shared = Arc<RwLock<Object>>;

struct Slot {
    generation: u32,
    obj: Option<Shared>,
}

#[derive(Default)]
struct Table {
    slots: Vec<Slot>,
    free: Vec<usize>,
}

fn table() -> &'static Mutex<Table> {
    static TABLE: OnceLock<Mutex<Table>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(Table::default()))
}

fn lock() -> Result<std::sync::MutexGuard<'static, Table>, Status> {
    table().lock().map_err(|_| Status::Internal)
}

fn pack(index: usize, generation: u32) -> u64 {
    ((index as u64 + 1) << 32) | generation as u64
}

fn unpack(h: u64) -> Option<(usize, u32)> {
    let index = (h >> 32) as usize;
    if index == 0 {
        return None;
    }
    Some((index - 1, h as u32))
}

pub fn insert(obj: Object) -> Result<u64, Status> {
    let mut t = lock()?;
    let shared = Arc::new(RwLock::new(obj));
    if let Some(i) = t.free.pop() {
        let slot = &mut t.slots[i];
        slot.obj = Some(shared);
        return Ok(pack(i, slot.generation));
    }
    t.slots.push(Slot { generation: 1, obj: Some(shared) });
    Ok(pack(t.slots.len() - 1, 1))
}

pub fn get(h: u64) -> Result<Shared, Status> {
    let t = lock()?;
    let (i, generation) = unpack(h).ok_or(Status::InvalidHandle)?;
    match t.slots.get(i) {
        Some(Slot { generation: g, obj: Some(o) }) if *g == generation => Ok(Arc::clone(o)),
        _ => Err(Status::InvalidHandle),
    }
}

/// Drops the table's reference. Calls already holding the object finish
/// normally.
pub fn remove(h: u64) -> Result<(), Status> {
    let mut t = lock()?;
    let (i, generation) = unpack(h).ok_or(Status::InvalidHandle)?;
    match t.slots.get_mut(i) {
        Some(slot) if slot.generation == generation && slot.obj.is_some() => {
            slot.obj = None;
            slot.generation = slot.generation.wrapping_add(1).max(1);
            t.free.push(i);
            Ok(())
        }
        _ => Err(Status::InvalidHandle),
    }
}
