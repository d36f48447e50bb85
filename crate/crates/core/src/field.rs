/// Row-major real-valued 2-D array (derivative magnitudes, DCT coefficients).
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
}

impl Field {
    pub fn zeros(width: usize, height: usize) -> Self {
        Field {
            width,
            height,
            values: vec![0.0; width * height],
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.values[y * self.width + x] = v;
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

impl From<&crate::image::GrayImage> for Field {
    fn from(img: &crate::image::GrayImage) -> Self {
        Field {
            width: img.width(),
            height: img.height(),
            values: img.pixels().to_vec(),
        }
    }
}
