/** Boot the viewer once the document is ready. */
import { renderAll } from './viewer.js';

if (typeof document !== 'undefined') {
  if (document.readyState === 'loading') {
    document.addEventListener('DOMContentLoaded', () => renderAll(document));
  } else {
    renderAll(document);
  }
}
