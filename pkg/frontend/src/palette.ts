// The engine's fixed 16-color sketch palette (index order matters).

export interface PaletteColor {
  index: number;
  name: string;
  rgb: [number, number, number];
}

export const PALETTE: PaletteColor[] = [
  { index: 0, name: "black", rgb: [0, 0, 0] },
  { index: 1, name: "white", rgb: [255, 255, 255] },
  { index: 2, name: "gray", rgb: [128, 128, 128] },
  { index: 3, name: "silver", rgb: [192, 192, 192] },
  { index: 4, name: "red", rgb: [255, 0, 0] },
  { index: 5, name: "maroon", rgb: [128, 0, 0] },
  { index: 6, name: "yellow", rgb: [255, 255, 0] },
  { index: 7, name: "olive", rgb: [128, 128, 0] },
  { index: 8, name: "lime", rgb: [0, 255, 0] },
  { index: 9, name: "green", rgb: [0, 128, 0] },
  { index: 10, name: "cyan", rgb: [0, 255, 255] },
  { index: 11, name: "teal", rgb: [0, 128, 128] },
  { index: 12, name: "blue", rgb: [0, 0, 255] },
  { index: 13, name: "navy", rgb: [0, 0, 128] },
  { index: 14, name: "magenta", rgb: [255, 0, 255] },
  { index: 15, name: "purple", rgb: [128, 0, 128] },
];

export function cssColor(index: number): string {
  const [r, g, b] = PALETTE[index].rgb;
  return `rgb(${r}, ${g}, ${b})`;
}

export const SKETCH_GRID = 4;
