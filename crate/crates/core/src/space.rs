use crate::diagram::OrderedDiagram;
use crate::error::{Error, Result};
use crate::measures::{renorm_data, tail_measure, MeasureVectors, RenormData};
use crate::paths::PathTable;

/// A diagram together with its path tables, measure and Perron data up to a
/// fixed cylinder depth. Cylinder functions index into this.
#[derive(Clone, Debug)]
pub struct PathSpace {
    pub diagram: OrderedDiagram,
    pub table: PathTable,
    pub measure: MeasureVectors,
    pub renorm: RenormData,
}

impl PathSpace {
    pub fn new(diagram: OrderedDiagram, depth: usize) -> Result<Self> {
        let table = PathTable::build(&diagram, depth)?;
        let measure = tail_measure(&diagram, depth)?;
        let renorm = renorm_data(&diagram, &measure)?;
        Ok(PathSpace { diagram, table, measure, renorm })
    }

    /// Largest cylinder level available.
    pub fn depth(&self) -> usize {
        self.table.depth()
    }

    pub fn lambda(&self) -> f64 {
        self.renorm.lambda_mu
    }

    pub fn require(&self, level: usize) -> Result<()> {
        if level > self.depth() {
            Err(Error::LevelCap { level, cap: self.depth() })
        } else {
            Ok(())
        }
    }
}
