// Small shared DOM helpers: element builder, error banner, context menu.

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, attrs: Record<string, string> = {}, ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) {
    if (k === "class") node.className = v;
    else node.setAttribute(k, v);
  }
  node.append(...children);
  return node;
}

let bannerHost: HTMLElement | null = null;

export function installBanner(host: HTMLElement): void {
  bannerHost = host;
}

export function showBanner(message: string): void {
  if (!bannerHost) return;
  const item = el("div", { class: "banner" },
    el("span", {}, message),
    el("button", { class: "banner-close" }, "x"));
  item.querySelector("button")!.addEventListener("click", () => item.remove());
  bannerHost.append(item);
  setTimeout(() => item.remove(), 8000);
}

export interface MenuItem {
  label: string;
  action: () => void;
}

let openMenu: HTMLElement | null = null;

export function showMenu(x: number, y: number, items: MenuItem[]): void {
  closeMenu();
  const menu = el("div", { class: "ctx-menu" });
  for (const item of items) {
    const row = el("div", { class: "ctx-item" }, item.label);
    row.addEventListener("click", () => {
      closeMenu();
      item.action();
    });
    menu.append(row);
  }
  menu.style.left = `${x}px`;
  menu.style.top = `${y}px`;
  document.body.append(menu);
  openMenu = menu;
}

export function closeMenu(): void {
  openMenu?.remove();
  openMenu = null;
}

document.addEventListener("click", (ev) => {
  if (openMenu && !openMenu.contains(ev.target as Node)) closeMenu();
});
